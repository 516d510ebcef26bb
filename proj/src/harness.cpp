#include "cfmimo/harness.hpp"

#include "cfmimo/error.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/topology.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace cfmimo {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value)
{
    T out{};
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("invalid value for '" + key + "': '" + value + "'");
    return out;
}

double parse_double(const std::string& key, const std::string& value)
{
    // libstdc++ 11 has floating-point from_chars, but strtod accepts the same inputs and more spellings.
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size())
        throw ConfigError("invalid value for '" + key + "': '" + value + "'");
    return v;
}

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

std::string_view sweep_variable_name(SweepVariable v)
{
    switch (v)
    {
    case SweepVariable::NumAps:
        return "num_aps";
    case SweepVariable::NumUes:
        return "num_ues";
    case SweepVariable::NumPilots:
        return "num_pilots";
    }
    return "unknown";
}

std::optional<SweepVariable> parse_sweep_variable(std::string_view name)
{
    for (auto v : {SweepVariable::NumAps, SweepVariable::NumUes, SweepVariable::NumPilots})
        if (sweep_variable_name(v) == name)
            return v;
    return std::nullopt;
}

void ExperimentConfig::validate() const
{
    sim.validate();
    if (strategies.empty())
        throw ConfigError("at least one strategy is required");
    if (sweep)
    {
        if (sweep->values.empty())
            throw ConfigError("sweep needs at least one value");
        for (int v : sweep->values)
            if (v < 1)
                throw ConfigError("sweep values must be positive");
    }
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value)
{
    auto& s = cfg.sim;
    if (key == "area_side")
        s.area_side = parse_double(key, value);
    else if (key == "num_aps")
        s.num_aps = parse_number<int>(key, value);
    else if (key == "num_ues")
        s.num_ues = parse_number<int>(key, value);
    else if (key == "num_pilots")
        s.num_pilots = parse_number<int>(key, value);
    else if (key == "coherence_len")
        s.coherence_len = parse_number<int>(key, value);
    else if (key == "bandwidth")
        s.bandwidth = parse_double(key, value);
    else if (key == "pilot_tx_power")
        s.pilot_tx_power = parse_double(key, value);
    else if (key == "uplink_tx_power")
        s.uplink_tx_power = parse_double(key, value);
    else if (key == "noise_figure")
        s.noise_figure = parse_double(key, value);
    else if (key == "noise_temp")
        s.noise_temp = parse_double(key, value);
    else if (key == "boltzmann")
        s.boltzmann = parse_double(key, value);
    else if (key == "shadowing_sigma")
        s.shadowing_sigma = parse_double(key, value);
    else if (key == "realizations")
        s.realizations = parse_number<int>(key, value);
    else if (key == "seed")
        s.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "strategies")
    {
        cfg.strategies.clear();
        for (const auto& name : split_list(value))
        {
            const auto st = parse_strategy(name);
            if (!st)
                throw ConfigError("unknown strategy '" + name + "'");
            cfg.strategies.push_back(*st);
        }
    }
    else if (key == "power_policy")
    {
        const auto p = parse_policy(value);
        if (!p)
            throw ConfigError("unknown power policy '" + value + "'");
        cfg.power_policy = *p;
    }
    else if (key == "output_path")
        cfg.output_path = value;
    else if (key == "greedy_iterations")
        cfg.greedy_iterations = parse_number<int>(key, value);
    else if (key == "threads")
        cfg.threads = parse_number<unsigned>(key, value);
    else if (key == "sweep_var")
    {
        const auto v = parse_sweep_variable(value);
        if (!v)
            throw ConfigError("unknown sweep variable '" + value + "'");
        if (!cfg.sweep)
            cfg.sweep.emplace();
        cfg.sweep->variable = *v;
    }
    else if (key == "sweep_values")
    {
        if (!cfg.sweep)
            cfg.sweep.emplace();
        cfg.sweep->values.clear();
        for (const auto& v : split_list(value))
            cfg.sweep->values.push_back(parse_number<int>(key, v));
    }
    else
        throw ConfigError("unknown configuration key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<ThroughputRecord> run_realization(const ExperimentConfig& cfg, std::size_t index)
{
    const SimConfig& sim = cfg.sim;
    const NetworkRealization net = generate_realization(sim, index);
    const double rho_p = pilot_snr(sim);
    const double rho_u = uplink_snr(sim);
    StrategyOptions options;
    options.greedy_iterations = cfg.greedy_iterations;

    std::vector<ThroughputRecord> out;
    out.reserve(cfg.strategies.size() * net.num_ues());
    for (Strategy s : cfg.strategies)
    {
        const auto seed = substream_seed(sim.seed, index, 1 + static_cast<std::uint64_t>(s));
        const PilotAssignment p = assign_pilots(s, net, sim, seed, options);
        const EstimationQuality est = estimation_quality(net.beta, p, sim.num_pilots, rho_p);
        const SinrTerms terms = sinr_terms(net.beta, est.gamma, p);
        const PowerCoefficients eta = cfg.power_policy == PowerPolicy::MaxMin
                                          ? max_min_power_detailed(terms, rho_u).eta
                                          : full_power(static_cast<int>(net.num_ues()));
        const Eigen::VectorXd sinr = uplink_sinr(terms, eta, rho_u);
        for (Eigen::Index k = 0; k < sinr.size(); ++k)
        {
            out.push_back({index, std::string(strategy_name(s)), static_cast<int>(k), sinr(k),
                           throughput(sinr(k), sim)});
        }
    }
    return out;
}

} // namespace

std::vector<ThroughputRecord> run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.sim.realizations);
    std::vector<std::vector<ThroughputRecord>> per_realization(n);

    unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
            try
            {
                per_realization[i] = run_realization(cfg, i);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n;
            }
        }
    };
    if (workers <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<ThroughputRecord> records;
    records.reserve(n * cfg.strategies.size() * static_cast<std::size_t>(cfg.sim.num_ues));
    for (auto& chunk : per_realization)
        std::move(chunk.begin(), chunk.end(), std::back_inserter(records));
    return records;
}

double percentile(std::vector<double> values, double q)
{
    if (values.empty())
        throw InvalidInput("percentile: empty input");
    if (!(q > 0.0 && q <= 1.0))
        throw InvalidInput("percentile: q must lie in (0, 1]");
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size()) - 1e-9));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values)
{
    if (values.empty())
        throw InvalidInput("empirical_cdf: empty input");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::vector<std::pair<double, double>> steps;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i + 1 < values.size() && values[i + 1] == values[i])
            continue;
        steps.emplace_back(values[i], static_cast<double>(i + 1) / n);
    }
    return steps;
}

double ks_distance(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
        throw InvalidInput("ks_distance: empty input");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size())
    {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

void write_csv(std::ostream& out, const std::vector<ThroughputRecord>& records)
{
    out << kCsvHeader << '\n';
    for (const auto& r : records)
    {
        out << r.realization << ',' << r.strategy << ',' << r.ue << ',' << format_double(r.sinr) << ','
            << format_double(r.throughput_bps) << '\n';
    }
}

std::vector<ThroughputRecord> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw ConfigError("CSV header must be '" + std::string(kCsvHeader) + "'");
    std::vector<ThroughputRecord> records;
    int lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        const auto fields = [&] {
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string item;
            while (std::getline(ss, item, ','))
                f.push_back(item);
            return f;
        }();
        if (fields.size() != 5)
            throw ConfigError("CSV line " + std::to_string(lineno) + ": expected 5 fields");
        ThroughputRecord r;
        r.realization = parse_number<std::size_t>("realization", fields[0]);
        r.strategy = fields[1];
        r.ue = parse_number<int>("ue", fields[2]);
        r.sinr = parse_double("sinr", fields[3]);
        r.throughput_bps = parse_double("throughput_bps", fields[4]);
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<double> throughput_of(const std::vector<ThroughputRecord>& records, const std::string& strategy)
{
    std::vector<double> v;
    for (const auto& r : records)
        if (r.strategy == strategy)
            v.push_back(r.throughput_bps);
    return v;
}

std::vector<StrategySummary> summarize(const std::vector<ThroughputRecord>& records, double q)
{
    std::vector<std::string> order;
    for (const auto& r : records)
        if (std::find(order.begin(), order.end(), r.strategy) == order.end())
            order.push_back(r.strategy);

    std::vector<StrategySummary> out;
    for (const auto& name : order)
    {
        const auto values = throughput_of(records, name);
        StrategySummary s;
        s.strategy = name;
        s.samples = values.size();
        s.percentile_bps = percentile(values, q);
        double total = 0.0;
        for (double v : values)
            total += v;
        s.mean_bps = total / static_cast<double>(values.size());
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, double q)
{
    if (!cfg.sweep)
        throw ConfigError("run_sweep: no sweep configured");
    std::vector<SweepRow> rows;
    for (int value : cfg.sweep->values)
    {
        ExperimentConfig point = cfg;
        switch (cfg.sweep->variable)
        {
        case SweepVariable::NumAps:
            point.sim.num_aps = value;
            break;
        case SweepVariable::NumUes:
            point.sim.num_ues = value;
            break;
        case SweepVariable::NumPilots:
            point.sim.num_pilots = value;
            break;
        }
        const auto records = run_experiment(point);
        for (auto& s : summarize(records, q))
            rows.push_back({std::string(sweep_variable_name(cfg.sweep->variable)), value, std::move(s)});
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, double q)
{
    out << "# percentile: nearest-rank, q = " << format_double(q) << '\n';
    out << "variable,value,strategy,samples,percentile_bps,mean_bps\n";
    for (const auto& r : rows)
    {
        out << r.variable << ',' << r.value << ',' << r.summary.strategy << ',' << r.summary.samples << ','
            << format_double(r.summary.percentile_bps) << ',' << format_double(r.summary.mean_bps) << '\n';
    }
}

} // namespace cfmimo
