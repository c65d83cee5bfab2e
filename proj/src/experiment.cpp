#include "srcid/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace srcid {

ConfigError::ConfigError(const std::string& message, std::string key, int line)
    : std::runtime_error(message), key_(std::move(key)), line_(line)
{
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

double parse_real(std::string_view text, const std::string& key)
{
    text = trim(text);
    if (text == "inf" || text == "+inf")
        return std::numeric_limits<double>::infinity();
    double value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("key '" + key + "': expected a number, got '" + std::string(text) + "'", key);
    return value;
}

template <typename Int>
Int parse_integer(std::string_view text, const std::string& key)
{
    text = trim(text);
    Int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("key '" + key + "': expected an integer, got '" + std::string(text) + "'", key);
    return value;
}

std::vector<double> parse_real_list(std::string_view text, const std::string& key)
{
    std::vector<double> out;
    for (auto item : split(text, ','))
        out.push_back(parse_real(item, key));
    return out;
}

// "1,2,5" or ranges "1-20", mixed.
std::vector<std::uint64_t> parse_seed_list(std::string_view text, const std::string& key)
{
    std::vector<std::uint64_t> out;
    for (auto item : split(text, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string_view::npos) {
            out.push_back(parse_integer<std::uint64_t>(item, key));
            continue;
        }
        const auto lo = parse_integer<std::uint64_t>(item.substr(0, dash), key);
        const auto hi = parse_integer<std::uint64_t>(item.substr(dash + 1), key);
        if (hi < lo)
            throw ConfigError("key '" + key + "': empty seed range '" + std::string(item) + "'", key);
        for (auto s = lo; s <= hi; ++s)
            out.push_back(s);
    }
    return out;
}

// "begin:end:value, ..." with end possibly "inf".
std::vector<Piece<double>> parse_pieces(std::string_view text, const std::string& key)
{
    std::vector<Piece<double>> out;
    for (auto item : split(text, ',')) {
        const auto fields = split(item, ':');
        if (fields.size() != 3)
            throw ConfigError("key '" + key + "': piece '" + std::string(item) + "' is not begin:end:value", key);
        out.push_back({parse_real(fields[0], key), parse_real(fields[1], key), parse_real(fields[2], key)});
    }
    return out;
}

NoiseKind parse_noise(std::string_view text, const std::string& key)
{
    if (text == "gaussian")
        return NoiseKind::gaussian;
    if (text == "uniform")
        return NoiseKind::uniform;
    throw ConfigError("key '" + key + "': expected gaussian or uniform, got '" + std::string(text) + "'", key);
}

std::string noise_name(NoiseKind kind) { return kind == NoiseKind::gaussian ? "gaussian" : "uniform"; }

using Setter = std::function<void(ExperimentConfig&, std::string_view, const std::string&)>;

template <typename T>
T& source_as(ExperimentConfig& c, const std::string& key)
{
    if (auto* s = std::get_if<T>(&c.source))
        return *s;
    throw ConfigError("key '" + key + "' does not apply to the configured source.kind", key);
}

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"source.kind",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
             if (v == "exponential_decay")
                 c.source = ExponentialDecay<double>{1, 1};
             else if (v == "piecewise_constant")
                 c.source = PiecewiseConstant<double>{};
             else if (v == "tabulated")
                 c.source = Tabulated<double>{};
             else
                 throw ConfigError("key '" + k +
                                       "': expected exponential_decay, piecewise_constant or tabulated, got '" +
                                       std::string(v) + "'",
                                   k);
         }},
        {"source.amplitude",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
             source_as<ExponentialDecay<double>>(c, k).amplitude = parse_real(v, k);
         }},
        {"source.cutoff",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
             source_as<ExponentialDecay<double>>(c, k).cutoff = parse_real(v, k);
         }},
        {"source.pieces",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
             source_as<PiecewiseConstant<double>>(c, k).pieces = parse_pieces(v, k);
         }},
        {"source.values",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
             source_as<Tabulated<double>>(c, k).samples = parse_real_list(v, k);
         }},
        {"params.alpha2", [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.alpha2 = parse_real(v, k); }},
        {"params.beta", [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.beta = parse_real(v, k); }},
        {"params.nu", [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.nu = parse_real(v, k); }},
        {"params.x0", [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.x0 = parse_real(v, k); }},
        {"grid.n",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
             c.grid.n = parse_integer<Eigen::Index>(v, k);
         }},
        {"grid.t_total",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.grid.t_total = parse_real(v, k); }},
        {"grid.pad",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
             c.grid.pad_factor = parse_integer<Eigen::Index>(v, k);
         }},
        {"sweep.p", [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.p = parse_real(v, k); }},
        {"sweep.deltas",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.deltas = parse_real_list(v, k); }},
        {"sweep.seeds",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.seeds = parse_seed_list(v, k); }},
        {"sweep.mu_rule",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
             try {
                 c.mu_rule = MuRule::parse(v);
             } catch (const DomainError& e) {
                 throw ConfigError("key '" + k + "': " + e.what(), k);
             }
         }},
        {"sweep.noise",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.noise = parse_noise(v, k); }},
        {"sweep.source_bound",
         [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.source_bound = parse_real(v, k); }},
        {"output.dir", [](ExperimentConfig& c, std::string_view v, const std::string&) { c.output_dir = std::string(v); }},
    };
    return table;
}

std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

std::string describe_source(const SourceSpec<double>& spec)
{
    return std::visit(
        [](const auto& s) -> std::string {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, ExponentialDecay<double>>) {
                return "kind = exponential_decay\namplitude = " + format_number(s.amplitude) +
                       "\ncutoff = " + format_number(s.cutoff) + "\n";
            } else if constexpr (std::is_same_v<S, PiecewiseConstant<double>>) {
                std::string pieces;
                for (const auto& p : s.pieces) {
                    if (!pieces.empty())
                        pieces += ", ";
                    pieces += format_number(p.begin) + ":" + format_number(p.end) + ":" + format_number(p.value);
                }
                return "kind = piecewise_constant\npieces = " + pieces + "\n";
            } else {
                std::string values;
                for (double v : s.samples) {
                    if (!values.empty())
                        values += ", ";
                    values += format_number(v);
                }
                return "kind = tabulated\nvalues = " + values + "\n";
            }
        },
        spec);
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds)
{
    std::string out;
    for (auto s : seeds) {
        if (!out.empty())
            out += ", ";
        out += std::to_string(s);
    }
    return out;
}

std::string join_reals(const std::vector<double>& values)
{
    std::string out;
    for (double v : values) {
        if (!out.empty())
            out += ", ";
        out += format_number(v);
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

std::string manifest_text(const ExperimentConfig& config, double source_bound, const std::optional<std::string>& text)
{
    std::ostringstream os;
    os << "# resolved experiment configuration\n";
    os << "name = " << config.name << "\n";
    if (text)
        os << "config_fnv1a64 = " << hex64(fnv1a64(*text)) << "\n";
    os << "\n[source]\n" << describe_source(config.source);
    os << "\n[params]\nalpha2 = " << format_number(config.alpha2) << "\nbeta = " << format_number(config.beta)
       << "\nnu = " << format_number(config.nu) << "\nx0 = " << format_number(config.x0) << "\n";
    os << "\n[grid]\nn = " << config.grid.n << "\nt_total = " << format_number(config.grid.t_total)
       << "\npad = " << config.grid.pad_factor << "\n";
    os << "\n[sweep]\np = " << format_number(config.p) << "\ndeltas = " << join_reals(config.deltas)
       << "\nseeds = " << join_seeds(config.seeds) << "\nmu_rule = " << config.mu_rule.to_string()
       << "\nnoise = " << noise_name(config.noise) << "\n";
    if (config.source_bound)
        os << "source_bound = " << format_number(*config.source_bound) << "\n";
    os << "\n[derived]\nsource_bound_used = " << format_number(source_bound)
       << "\nnoise_constant = " << format_number(noise_constant(config.params()))
       << "\ndecay_exponent = " << format_number(config.params().decay_exponent()) << "\n";
    return os.str();
}

} // namespace

std::string format_number(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> default_deltas()
{
    std::vector<double> d;
    for (int i = 1; i <= 10; ++i)
        d.push_back(i / 100.0);
    return d;
}

std::vector<std::uint64_t> default_seeds()
{
    std::vector<std::uint64_t> s;
    for (std::uint64_t i = 1; i <= 20; ++i)
        s.push_back(i);
    return s;
}

std::vector<std::string> preset_names() { return {"example1", "example2"}; }

ExperimentConfig preset(const std::string& name)
{
    ExperimentConfig c;
    c.name = name;
    c.deltas = default_deltas();
    c.seeds = default_seeds();
    if (name == "example1") {
        c.source = example1_source<double>();
        c.alpha2 = 0.01;
        c.beta = 0.5;
        c.nu = 1.51;
        c.x0 = 2;
        c.p = 2;
    } else if (name == "example2") {
        c.source = example2_source<double>();
        c.alpha2 = 0.1;
        c.beta = 0.9;
        c.nu = 1;
        c.x0 = 3;
        c.p = 3;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected example1 or example2)", "preset");
    }
    c.output_dir = "out/" + name;
    return c;
}

void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value)
{
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end())
        throw ConfigError("unknown configuration key '" + key + "'", key);
    it->second(config, trim(value), key);
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto& [k, _] : setters())
        keys.push_back(k);
    return keys;
}

void validate(const ExperimentConfig& config)
{
    try {
        const auto params = config.params();
        const auto grid = config.grid.make();
        render_source(config.source, grid);
        detail::require(config.p > 0, "smoothness order p > 0 violated");
        detail::require(!config.deltas.empty(), "at least one delta required");
        detail::require(!config.seeds.empty(), "at least one seed required");
        for (double d : config.deltas)
            choose_mu(d, config.p, config.mu_rule);
        if (config.source_bound)
            detail::require(*config.source_bound > 0, "source_bound > 0 violated");
        (void)params;
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin)
{
    ExperimentConfig config;
    config.deltas = default_deltas();
    config.seeds = default_seeds();

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": malformed section header", {}, line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(where + ": expected key = value", {}, line_no);
        const std::string name(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        const std::string key = section.empty() ? name : section + "." + name;
        try {
            if (key == "preset") {
                config = preset(value);
                continue;
            }
            if (key == "name") {
                config.name = value;
                continue;
            }
            apply_override(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what(), key, line_no);
        }
    }
    validate(config);
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string errors_csv(const std::vector<DeltaSummary<double>>& rows)
{
    std::string out = "delta,mu,err_unreg_mean,err_unreg_min,err_unreg_max,err_reg_mean,err_reg_min,err_reg_max,"
                      "bound,rule,seeds\n";
    for (const auto& r : rows) {
        for (double v : {r.delta, r.mu, r.err_unreg_mean, r.err_unreg_min, r.err_unreg_max, r.err_reg_mean,
                         r.err_reg_min, r.err_reg_max, r.bound})
            out += format_number(v) + ",";
        out += r.rule.to_string() + "," + std::to_string(r.seeds) + "\n";
    }
    return out;
}

std::string reconstruction_csv(const Signal<double>& truth, const Signal<double>& unreg, const Signal<double>& reg)
{
    std::string out = "t,f_true,f_unreg,f_reg\n";
    for (Eigen::Index j = 0; j < truth.grid.n(); ++j)
        out += format_number(truth.grid.time(j)) + "," + format_number(truth.samples[j]) + "," +
               format_number(unreg.samples[j]) + "," + format_number(reg.samples[j]) + "\n";
    return out;
}

std::string reconstruction_filename(double delta) { return "reconstruction_" + format_number(delta) + ".csv"; }

RunResult run_experiment(const ExperimentConfig& config, const std::optional<std::string>& config_text)
{
    validate(config);
    const auto problem =
        prepare_problem(config.source, config.params(), config.grid.make(), config.p, config.source_bound, config.noise);

    RunResult result;
    result.source_bound = problem.source_bound;
    result.reports = sweep(problem, config.deltas, config.mu_rule, config.seeds);
    result.rows = aggregate(result.reports);

    std::filesystem::create_directories(config.output_dir);
    const auto errors_path = config.output_dir / "errors.csv";
    write_file(errors_path, errors_csv(result.rows));
    result.files.push_back(errors_path);

    for (const auto& row : result.rows) {
        const auto rec = reconstruct(problem, row.delta, config.mu_rule, config.seeds.front());
        const auto path = config.output_dir / reconstruction_filename(row.delta);
        write_file(path, reconstruction_csv(problem.source, rec.unregularized, rec.regularized));
        result.files.push_back(path);
    }

    const auto manifest_path = config.output_dir / "manifest.txt";
    write_file(manifest_path, manifest_text(config, problem.source_bound, config_text));
    result.files.push_back(manifest_path);
    return result;
}

RunResult run_preset(const std::string& name, const std::map<std::string, std::string>& overrides)
{
    ExperimentConfig config = preset(name);
    for (const auto& [key, value] : overrides)
        apply_override(config, key, value);
    return run_experiment(config);
}

RunResult run_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    return run_experiment(parse_config(text, path.string()), text);
}

RateResult measure_rate(const ExperimentConfig& config)
{
    validate(config);
    const auto problem =
        prepare_problem(config.source, config.params(), config.grid.make(), config.p, config.source_bound, config.noise);
    const auto reports = sweep(problem, config.deltas, config.mu_rule, config.seeds);
    try {
        return {estimate_rate(reports), theoretical_rate(config.p), aggregate(reports)};
    } catch (const DomainError& e) {
        throw ConfigError(std::string("rate estimate: ") + e.what(), "sweep.deltas");
    }
}

} // namespace srcid
