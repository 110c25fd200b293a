#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qfc/qfc.hpp"

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using namespace qfc;

namespace {

struct ConfigError : ValidationError {
    using ValidationError::ValidationError;
};

// ---------------------------------------------------------------- config values

std::string trim(std::string s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& key)
{
    std::string s = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
    return v;
}

std::vector<double> parse_vector(const std::string& text, const std::string& key)
{
    std::string s = trim(text);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw ConfigError("config: '" + key + "' expects a bracketed list like [1, 0.5]");
    std::vector<double> out;
    std::stringstream in(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(in, item, ','))
        out.push_back(parse_number(item, key));
    return out;
}

std::vector<std::string> split_list(const std::string& text)
{
    // commas inside [...] belong to the item
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : text) {
        if (ch == '[')
            ++depth;
        if (ch == ']')
            --depth;
        if (ch == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty())
        out.push_back(trim(cur));
    return out;
}

struct Config {
    pt::ptree tree;

    std::optional<std::string> get(const std::string& key) const
    {
        if (auto v = tree.get_optional<std::string>(key))
            return trim(v->substr(0, v->find_first_of(";#")));
        return std::nullopt;
    }
    std::string text(const std::string& key, const std::string& fallback) const { return get(key).value_or(fallback); }
    double number(const std::string& key, double fallback) const
    {
        auto v = get(key);
        return v ? parse_number(*v, key) : fallback;
    }
    double number(const std::string& key) const
    {
        auto v = get(key);
        if (!v)
            throw ConfigError("config: missing required key '" + key + "'");
        return parse_number(*v, key);
    }
    int integer(const std::string& key, int fallback) const
    {
        double v = number(key, fallback);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            throw ConfigError("config: '" + key + "' expects an integer");
        return static_cast<int>(v);
    }
};

Config load_config(const std::optional<std::string>& path)
{
    Config c;
    if (!path)
        return c;
    std::ifstream in(*path);
    if (!in)
        throw ConfigError("cannot read config file '" + *path + "'");
    try {
        pt::read_ini(in, c.tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return c;
}

// ---------------------------------------------------------------- model

struct Model {
    std::string id;
    ChainSpec chain;
    int M = 0; // spins per slice when N = 2^M, else 0
};

std::vector<int> as_ints(const std::vector<double>& v, const std::string& key)
{
    std::vector<int> out;
    for (double x : v) {
        if (x != std::floor(x))
            throw ConfigError("config: '" + key + "' expects integers");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

int log2_exact(Eigen::Index N)
{
    for (int M = 0; M <= 20; ++M)
        if ((Eigen::Index{1} << M) == N)
            return M;
    return 0;
}

Model build_model(const Config& cfg)
{
    Model m;
    m.id = cfg.text("model.id", "");
    const int G = cfg.integer("model.G", 10);
    const double eps = cfg.number("model.eps", 1.0);
    const double t_in = cfg.number("model.t_in", 0.0);
    if (G < 1)
        throw ConfigError("config: model.G must be at least 1");
    if (m.id == "ising") {
        m.chain = models::ising_chain(cfg.number("model.beta"), G, eps, t_in);
    } else if (m.id == "four-state") {
        m.chain = models::four_state_chain(cfg.number("model.eta"), G, eps, t_in);
    } else if (m.id == "unique-jump") {
        auto perm = as_ints(parse_vector(cfg.text("model.permutation", ""), "model.permutation"), "model.permutation");
        std::optional<std::vector<int>> signs;
        if (auto s = cfg.get("model.signs"))
            signs = as_ints(parse_vector(*s, "model.signs"), "model.signs");
        m.chain = models::unique_jump_chain(perm, G, signs, eps);
        m.chain.t_in = t_in;
    } else if (m.id == "three-spin-pl") {
        models::SPlParams p;
        p.a_p = cfg.number("model.a_plus");
        p.b_p = cfg.number("model.b_plus");
        p.c_p = cfg.number("model.c_plus");
        p.d_p = cfg.number("model.d_plus");
        p.a_m = cfg.number("model.a_minus");
        p.b_m = cfg.number("model.b_minus");
        p.c_m = cfg.number("model.c_minus");
        p.d_m = cfg.number("model.d_minus");
        m.chain = uniform_chain<double>(models::three_spin_pl(p).matrix, G, eps, t_in);
    } else if (m.id == "gate") {
        m.chain = uniform_chain<double>(models::three_spin_gate(models::parse_gate(cfg.text("model.gate", ""))).S.matrix,
                                        G, eps, t_in);
    } else if (m.id == "fermion") {
        m.chain = uniform_chain<double>(models::diagonal_ising_step(cfg.integer("model.M_x", 3)).matrix, G, eps, t_in);
    } else if (m.id == "matrix") {
        auto rows = split_list(cfg.text("model.S", ""));
        if (rows.empty())
            throw ConfigError("config: model.S expects rows like [1, 0], [0, 1]");
        MatR S(rows.size(), rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            auto r = parse_vector(rows[i], "model.S");
            if (r.size() != rows.size())
                throw ConfigError("config: model.S must be square");
            for (std::size_t j = 0; j < r.size(); ++j)
                S(i, j) = r[j];
        }
        m.chain = uniform_chain<double>(cfg.text("model.normalize", "true") == "true" ? normalize_step(S).matrix : S, G,
                                        eps, t_in);
    } else {
        throw ConfigError("config: unknown model.id '" + m.id
                          + "' (ising, four-state, unique-jump, three-spin-pl, gate, fermion, matrix)");
    }
    validate(m.chain);
    m.M = log2_exact(m.chain.N);
    return m;
}

// ---------------------------------------------------------------- boundary and observables

VecR boundary_vector(const Config& cfg, const std::string& key, Eigen::Index N)
{
    std::string v = cfg.text(key, "uniform");
    if (v == "uniform")
        return VecR::Ones(N);
    if (v.rfind("unit:", 0) == 0) {
        int k = static_cast<int>(parse_number(v.substr(5), key));
        if (k < 1 || k > N)
            throw ConfigError("config: '" + key + "' unit index out of range 1.." + std::to_string(N));
        return VecR::Unit(N, k - 1);
    }
    auto x = parse_vector(v, key);
    if (static_cast<Eigen::Index>(x.size()) != N)
        throw ConfigError("config: '" + key + "' has " + std::to_string(x.size()) + " entries, model has N = "
                          + std::to_string(N));
    return Eigen::Map<VecR>(x.data(), N);
}

BoundaryCondition boundary_condition(const Config& cfg, const Model& m)
{
    std::string type = cfg.text("boundary.type", "pure");
    if (type == "pure")
        return PureBoundary{boundary_vector(cfg, "boundary.q_in", m.chain.N), boundary_vector(cfg, "boundary.q_f", m.chain.N)};
    if (type == "periodic")
        return PeriodicBoundary{};
    throw ConfigError("config: boundary.type must be pure or periodic");
}

struct Observable {
    std::string name;
    MatR A;
};

Observable named_observable(const std::string& id, const Model& m)
{
    const Eigen::Index N = m.chain.N;
    auto need_spins = [&](int g) {
        if (m.M == 0)
            throw ConfigError("observable '" + id + "' needs N = 2^M");
        if (g < 1 || g > m.M)
            throw ConfigError("observable '" + id + "': spin index out of range 1.." + std::to_string(m.M));
    };
    if (id == "delta_n") {
        if (N != 2)
            throw ConfigError("observable delta_n needs N = 2");
        return {id, MatR(models::ising_occupation() - 0.5 * MatR::Identity(2, 2))};
    }
    if (id == "s1" || id == "s2" || id == "s3") {
        if (N != 8)
            throw ConfigError("observable " + id + " needs the three-spin model (N = 8)");
        return {id, models::three_spin_operator(id[1] - '0')};
    }
    if (id.rfind("spin:", 0) == 0 || id.rfind("occupation:", 0) == 0) {
        bool spin = id[0] == 's';
        int g = static_cast<int>(parse_number(id.substr(spin ? 5 : 11), "observables"));
        need_spins(g);
        VecR v = spin ? spin_values(m.M, g - 1) : occupation_values(m.M, g - 1);
        return {id, MatR(v.asDiagonal())};
    }
    if (id.rfind("diag:", 0) == 0) {
        auto v = parse_vector(id.substr(5), "observables");
        if (static_cast<Eigen::Index>(v.size()) != N)
            throw ConfigError("observable '" + id + "' length differs from N");
        return {id, MatR(Eigen::Map<VecR>(v.data(), N).asDiagonal())};
    }
    throw ConfigError("unknown observable '" + id + "' (delta_n, s1..s3, spin:g, occupation:g, diag:[...])");
}

std::vector<Observable> observables(const Config& cfg, const Model& m)
{
    std::vector<Observable> out;
    for (const auto& s : split_list(cfg.text("observables.list", "")))
        out.push_back(named_observable(s, m));
    return out;
}

// ---------------------------------------------------------------- output

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(const fs::path& path) const
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ValidationError("cannot write '" + path.string() + "'");
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i)
                out << (i ? "," : "") << csv_field(r[i]);
            out << "\r\n";
        };
        line(header);
        for (const auto& r : rows)
            line(r);
    }
};

struct Run {
    Config cfg;
    fs::path out_dir;
    std::uint64_t seed = 0;
    bool quiet = false;
    std::vector<std::string> summary;

    void say(const std::string& s)
    {
        summary.push_back(s);
        if (!quiet)
            std::cout << s << "\n";
    }
    std::string stem(const std::string& fallback) const { return cfg.text("output.name", fallback); }
    void finish(const std::string& name, const Table& t)
    {
        fs::create_directories(out_dir);
        t.write(out_dir / (name + ".csv"));
        std::ofstream s(out_dir / (name + "_summary.txt"), std::ios::binary);
        for (const auto& l : summary)
            s << l << "\n";
    }
};

// which column groups to write: t, p, A, Z, diagnostics
std::set<std::string> column_groups(const Config& cfg)
{
    std::set<std::string> g;
    for (auto& s : split_list(cfg.text("output.columns", "t,p,A,Z,diagnostics"))) {
        if (s != "t" && s != "p" && s != "A" && s != "Z" && s != "diagnostics")
            throw ConfigError("config: output.columns entries are t, p, A, Z, diagnostics");
        g.insert(s);
    }
    return g;
}

Table slice_table(const Config& cfg, const Model& m, const std::vector<Observable>& obs, const std::vector<double>& t,
                  const std::vector<VecR>& p, const std::vector<std::vector<double>>& values, double Z,
                  const std::vector<std::pair<std::string, std::vector<double>>>& diagnostics)
{
    auto groups = column_groups(cfg);
    Table tab;
    if (groups.count("t"))
        tab.header.push_back("t");
    if (groups.count("p"))
        for (Eigen::Index i = 0; i < m.chain.N; ++i)
            tab.header.push_back("p_" + std::to_string(i + 1));
    if (groups.count("A"))
        for (const auto& o : obs)
            tab.header.push_back("<" + o.name + ">");
    if (groups.count("Z"))
        tab.header.push_back("Z");
    if (groups.count("diagnostics"))
        for (const auto& d : diagnostics)
            tab.header.push_back(d.first);
    for (std::size_t k = 0; k < t.size(); ++k) {
        std::vector<std::string> row;
        if (groups.count("t"))
            row.push_back(num(t[k]));
        if (groups.count("p"))
            for (Eigen::Index i = 0; i < m.chain.N; ++i)
                row.push_back(num(p[k][i]));
        if (groups.count("A"))
            for (std::size_t a = 0; a < obs.size(); ++a)
                row.push_back(num(values[k][a]));
        if (groups.count("Z"))
            row.push_back(num(Z));
        if (groups.count("diagnostics"))
            for (const auto& d : diagnostics)
                row.push_back(num(d.second[k]));
        tab.rows.push_back(row);
    }
    return tab;
}

// ---------------------------------------------------------------- commands

int cmd_boundary(Run& run)
{
    Model m = build_model(run.cfg);
    auto obs = observables(run.cfg, m);
    auto tr = solve_boundary(m.chain, boundary_condition(run.cfg, m));
    std::vector<double> t, sum_p, neg;
    std::vector<VecR> p;
    std::vector<std::vector<double>> values;
    for (const auto& s : tr.slices) {
        t.push_back(s.t);
        p.push_back(s.p);
        sum_p.push_back(s.p.sum());
        neg.push_back(std::max(0.0, -s.p.minCoeff()));
        std::vector<double> v;
        for (const auto& o : obs)
            v.push_back(expectation(s.rho, o.A));
        values.push_back(v);
    }
    run.say("boundary: model " + m.id + ", N = " + std::to_string(m.chain.N) + ", G = " + std::to_string(m.chain.G()));
    run.say("Z = " + num(tr.Z) + ", max |sum p - 1| = " + num(tr.trace_drift));
    run.say("positivity violations: " + std::to_string(tr.violations.size()));
    run.finish(run.stem("boundary"),
               slice_table(run.cfg, m, obs, t, p, values, tr.Z, {{"sum_p", sum_p}, {"max_negative_p", neg}}));
    return 0;
}

// Forward run of the density matrix ρ(t+ε) = S ρ S⁻¹ from ρ(t_in) = q̃ q̄ᵀ / q̄ᵀq̃.
int cmd_simulate(Run& run)
{
    Model m = build_model(run.cfg);
    auto obs = observables(run.cfg, m);
    VecR qt = boundary_vector(run.cfg, "boundary.q_in", m.chain.N);
    VecR qb = boundary_vector(run.cfg, "boundary.q_bar_in", m.chain.N);
    double Z = qb.dot(qt);
    if (!(std::abs(Z) > 0.0))
        throw NumericalError("simulate: q̄ᵀq̃ = 0 at t_in, normalization impossible");
    auto rho = pure_density<double>(qt, qb, m.chain.t_in);
    rho.matrix /= Z;
    std::vector<double> t, sum_p, trace;
    std::vector<VecR> p;
    std::vector<std::vector<double>> values;
    for (int k = 0;; ++k) {
        t.push_back(m.chain.time(k));
        VecR d = rho.matrix.diagonal();
        p.push_back(d);
        sum_p.push_back(d.sum());
        trace.push_back(rho.matrix.trace());
        std::vector<double> v;
        for (const auto& o : obs)
            v.push_back(expectation(rho, o.A));
        values.push_back(v);
        if (std::abs(trace.back() - 1.0) > 1e-9)
            throw NumericalError("simulate: tr ρ drifted to " + num(trace.back()) + " at t = " + num(t.back())
                                 + "; forward evolution is unstable for this chain, use the boundary command");
        if (k == m.chain.G())
            break;
        rho = evolve_density_step(rho, m.chain.S(k), m.chain.eps);
    }
    run.say("simulate: model " + m.id + ", N = " + std::to_string(m.chain.N) + ", G = " + std::to_string(m.chain.G()));
    run.say("initial Z = " + num(Z));
    run.finish(run.stem("simulate"), slice_table(run.cfg, m, obs, t, p, values, 1.0, {{"sum_p", sum_p}}));
    return 0;
}

int cmd_oracle_check(Run& run)
{
    std::mt19937_64 rng(run.seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    ChainSpec c;
    PureBoundary b;
    std::string what;
    if (run.cfg.get("model.id")) {
        Model m = build_model(run.cfg);
        c = m.chain;
        auto bc = boundary_condition(run.cfg, m);
        if (!std::holds_alternative<PureBoundary>(bc))
            throw ConfigError("oracle-check supports pure boundaries");
        b = std::get<PureBoundary>(bc);
        what = "model " + m.id;
    } else {
        const Eigen::Index N = std::uniform_int_distribution<int>(0, 1)(rng) ? 4 : 2;
        const int G = std::uniform_int_distribution<int>(2, 5)(rng);
        c = ChainSpec{N, 1.0, 0.0, {}};
        for (int k = 0; k < G; ++k) {
            MatR S(N, N);
            for (Eigen::Index i = 0; i < S.size(); ++i)
                S.data()[i] = u(rng);
            c.ops.push_back(normalize_step(S).matrix);
        }
        b.q_in.resize(N);
        b.q_f.resize(N);
        for (Eigen::Index i = 0; i < N; ++i) {
            b.q_in[i] = u(rng);
            b.q_f[i] = u(rng);
        }
        what = "random system N = " + std::to_string(N) + ", G = " + std::to_string(G);
    }
    auto tr = solve_boundary(c, b);
    auto h = oracle::enumerate_weights(c, b);
    Table tab;
    tab.header = {"t", "max_abs_dp", "max_abs_dA"};
    double worst = 0.0;
    for (int k = 0; k <= c.G(); ++k) {
        double dp = max_abs(VecR(tr.slices[k].p - oracle::oracle_probabilities(h, c.N, k)));
        double dA = 0.0;
        for (Eigen::Index i = 0; i < c.N; ++i) {
            VecR a = VecR::Unit(c.N, i) * (i + 1.0);
            dA = std::max(dA, std::abs(expectation(tr.slices[k].rho, MatR(a.asDiagonal()))
                                       - oracle::oracle_expectation(oracle::local(a, k), h)));
        }
        worst = std::max({worst, dp, dA});
        tab.rows.push_back({num(c.time(k)), num(dp), num(dA)});
    }
    bool ok = worst < 1e-12;
    run.say("oracle-check: " + what + ", " + std::to_string(h.size()) + " histories");
    if (run.quiet)
        std::cout << (ok ? "PASS" : "FAIL") << " max|Δ|=" << num(worst) << "\n";
    run.say(std::string(ok ? "PASS" : "FAIL") + " max|Δ|=" + num(worst));
    run.finish(run.stem("oracle_check"), tab);
    return ok ? 0 : 3;
}

int cmd_gates(Run& run)
{
    std::string word = run.cfg.text("gates.word", "");
    if (word.empty())
        throw ConfigError("config: gates.word is required, e.g. word = H UX U31");
    auto gates = models::parse_gate_word(word);
    auto r = parse_vector(run.cfg.text("gates.bloch", "[0, 0, 1]"), "gates.bloch");
    if (r.size() != 3)
        throw ConfigError("config: gates.bloch expects three components");
    models::BlochState b{r[0], r[1], r[2]};
    if (b.norm2() > 1.0 + 1e-12)
        throw ValidationError("gates: Bloch vector outside the unit ball");
    VecR p = models::product_distribution(b);
    MatC U = MatC::Identity(2, 2);
    Table tab;
    tab.header = {"step", "gate", "r1", "r2", "r3", "quantum_r1", "quantum_r2", "quantum_r3", "max_abs_dev"};
    double worst = 0.0;
    auto row = [&](int step, const std::string& g) {
        auto cl = models::bloch_from_probabilities(p);
        auto q = models::conjugate_bloch(b, U);
        double d = std::max({std::abs(cl.r1 - q.r1), std::abs(cl.r2 - q.r2), std::abs(cl.r3 - q.r3)});
        worst = std::max(worst, d);
        tab.rows.push_back({std::to_string(step), g, num(cl.r1), num(cl.r2), num(cl.r3), num(q.r1), num(q.r2), num(q.r3),
                            num(d)});
    };
    row(0, "");
    for (std::size_t k = 0; k < gates.size(); ++k) {
        auto g = models::three_spin_gate(gates[k]);
        p = g.S.matrix * p;
        U = g.U * U;
        row(static_cast<int>(k + 1), models::gate_name(gates[k]));
    }
    auto end = models::bloch_from_probabilities(p);
    run.say("gates: word '" + word + "', " + std::to_string(gates.size()) + " gates");
    run.say("final Bloch vector (" + num(end.r1) + ", " + num(end.r2) + ", " + num(end.r3) + ")");
    run.say("max |classical - quantum| = " + num(worst));
    run.finish(run.stem("gates"), tab);
    return 0;
}

int cmd_spectrum(Run& run)
{
    Model m = build_model(run.cfg);
    const MatR& S = m.chain.S(0);
    Table tab;
    tab.header = {"operator", "index", "re", "im", "abs", "arg"};
    auto add = [&](const std::string& name, const VecC& ev) {
        std::vector<int> order(ev.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (std::abs(ev[a]) != std::abs(ev[b]))
                return std::abs(ev[a]) > std::abs(ev[b]);
            return std::arg(ev[a]) > std::arg(ev[b]);
        });
        for (std::size_t i = 0; i < order.size(); ++i) {
            cplx z = ev[order[i]];
            // print exact zeros for rounding noise so the listing is stable across platforms
            double re = std::abs(z.real()) < 1e-14 ? 0.0 : z.real();
            double im = std::abs(z.imag()) < 1e-14 ? 0.0 : z.imag();
            tab.rows.push_back({name, std::to_string(i + 1), num(re), num(im), num(std::abs(z)),
                                num(std::atan2(im, re))});
            if (!run.quiet)
                std::cout << name << " λ" << i + 1 << " = " << num(re) << (im < 0 ? " - " : " + ") << num(std::abs(im))
                          << "i\n";
        }
    };
    add("S", eigenvalues(S));
    Eigen::EigenSolver<MatR> es(S);
    if (es.info() == Eigen::Success) {
        MatC V = es.eigenvectors();
        Table vt;
        vt.header = {"eigenvalue_re", "eigenvalue_im"};
        for (Eigen::Index i = 0; i < S.rows(); ++i) {
            vt.header.push_back("v" + std::to_string(i + 1) + "_re");
            vt.header.push_back("v" + std::to_string(i + 1) + "_im");
        }
        for (Eigen::Index j = 0; j < V.cols(); ++j) {
            std::vector<std::string> r{num(es.eigenvalues()[j].real()), num(es.eigenvalues()[j].imag())};
            for (Eigen::Index i = 0; i < V.rows(); ++i) {
                r.push_back(num(V(i, j).real()));
                r.push_back(num(V(i, j).imag()));
            }
            vt.rows.push_back(r);
        }
        fs::create_directories(run.out_dir);
        vt.write(run.out_dir / (run.stem("spectrum") + "_eigenvectors.csv"));
    }
    try {
        add("W", eigenvalues(generator<double>(S, m.chain.eps).W));
    } catch (const NumericalError& e) {
        run.say(std::string("W unavailable: ") + e.what());
    }
    run.say("spectrum: model " + m.id + ", N = " + std::to_string(m.chain.N) + ", spectral radius "
            + num(spectral_radius(S)));
    run.finish(run.stem("spectrum"), tab);
    return 0;
}

int cmd_transform(Run& run, const std::string& name)
{
    Model m = build_model(run.cfg);
    auto bc = boundary_condition(run.cfg, m);
    if (!std::holds_alternative<PureBoundary>(bc))
        throw ConfigError("transform supports pure boundaries");
    const auto& b = std::get<PureBoundary>(bc);
    System sys{m.chain, b.q_in, b.q_f};
    double Z0 = partition_function(sys);
    if (!(std::abs(Z0) > 0.0))
        throw NumericalError("transform: Z = 0, normalization impossible");
    sys.q_in /= Z0;
    auto obs = observables(run.cfg, m);
    if (obs.empty())
        for (Eigen::Index i = 0; i < m.chain.N; ++i)
            obs.push_back({"diag:e" + std::to_string(i + 1), MatR(VecR::Unit(m.chain.N, i).asDiagonal())});
    std::mt19937_64 rng(run.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto random_invertible = [&] {
        MatR D(m.chain.N, m.chain.N);
        for (Eigen::Index i = 0; i < D.size(); ++i)
            D.data()[i] = u(rng);
        return MatR(D + 2.0 * MatR::Identity(m.chain.N, m.chain.N));
    };
    const int G = m.chain.G();
    Table tab;
    tab.header = {"t", "observable", "original", "transformed", "abs_dev"};
    double worst = 0.0, dZ = 0.0;
    auto compare = [&](const System& out, const SimilaritySequence<double>& seq) {
        dZ = std::abs(partition_function(out) - partition_function(sys));
        for (int k = 0; k <= G; ++k)
            for (const auto& o : obs) {
                double a = slice_expectation(sys, o.A, k);
                double c = slice_expectation(out, transform_operator(seq, k, o.A), k);
                worst = std::max(worst, std::abs(a - c));
                tab.rows.push_back({num(m.chain.time(k)), o.name, num(a), num(c), num(std::abs(a - c))});
            }
    };
    if (name == "heisenberg") {
        auto h = heisenberg_picture(m.chain);
        for (int k = 0; k <= G; ++k)
            for (const auto& o : obs) {
                double a = slice_expectation(sys, o.A, k);
                double c = heisenberg_expectation(sys, h, o.A, k);
                worst = std::max(worst, std::abs(a - c));
                tab.rows.push_back({num(m.chain.time(k)), o.name, num(a), num(c), num(std::abs(a - c))});
            }
    } else if (name == "global") {
        auto seq = global_similarity<double>(random_invertible(), G);
        compare(qfc::apply(seq, sys), seq);
    } else if (name == "local") {
        std::vector<MatR> D;
        for (int k = 0; k <= G; ++k)
            D.push_back(random_invertible());
        auto seq = local_similarity(D);
        compare(qfc::apply(seq, sys), seq);
    } else if (name == "sign-gauge") {
        std::vector<VecR> s;
        for (int k = 0; k <= G; ++k) {
            VecR v(m.chain.N);
            for (Eigen::Index i = 0; i < v.size(); ++i)
                v[i] = u(rng) < 0 ? -1.0 : 1.0;
            s.push_back(v);
        }
        auto seq = sign_gauge(s);
        compare(qfc::apply(seq, sys), seq);
    } else if (name == "unitary-basis") {
        auto ub = unitary_basis_for_classical(m.chain);
        System out = qfc::apply(ub.sequence, sys);
        double unit = 0.0;
        for (const auto& S : out.chain.ops)
            unit = std::max(unit, max_abs(MatR(S * S.transpose() - MatR::Identity(m.chain.N, m.chain.N))));
        compare(out, ub.sequence);
        run.say("max |S'S'^T - 1| = " + num(unit) + ", min eigenvalue of B = " + num(ub.min_eigenvalue));
    } else {
        throw ConfigError("transform: unknown name '" + name
                          + "' (heisenberg, global, local, sign-gauge, unitary-basis)");
    }
    run.say("transform " + name + ": model " + m.id + ", N = " + std::to_string(m.chain.N) + ", G = " + std::to_string(G));
    run.say("max |<A> deviation| = " + num(worst) + ", |dZ| = " + num(dZ));
    run.finish("transform_" + name, tab);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum formalism for classical statistical chains"};
    std::string command, name;
    std::optional<std::string> config, out;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_option("command", command, "simulate | boundary | oracle-check | gates | spectrum | transform")->required();
    app.add_option("name", name, "transform name (heisenberg, global, local, sign-gauge, unitary-basis)");
    app.add_option("--config", config, "INI configuration file");
    app.add_option("--out", out, "output directory (overrides QFC_OUT_DIR and output.dir)");
    app.add_option("--seed", seed, "random seed");
    app.add_flag("--quiet", quiet, "print only the result line");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        Run run;
        run.cfg = load_config(config);
        run.quiet = quiet;
        if (out)
            run.out_dir = *out;
        else if (const char* env = std::getenv("QFC_OUT_DIR"); env && *env)
            run.out_dir = env;
        else
            run.out_dir = run.cfg.text("output.dir", ".");
        run.seed = seed ? *seed : static_cast<std::uint64_t>(run.cfg.number("run.seed", 0));
        if (command == "simulate")
            return cmd_simulate(run);
        if (command == "boundary")
            return cmd_boundary(run);
        if (command == "oracle-check")
            return cmd_oracle_check(run);
        if (command == "gates")
            return cmd_gates(run);
        if (command == "spectrum")
            return cmd_spectrum(run);
        if (command == "transform")
            return cmd_transform(run, name.empty() ? std::string("heisenberg") : name);
        std::cerr << "error: unknown command '" << command << "'\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const UnsupportedCase& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
