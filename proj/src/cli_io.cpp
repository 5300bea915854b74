#include "vortexlab/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vortexlab::cli_io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                return key == a;
            }) == allowed.end())
            fail(path + "/" + key, "unknown key");
    }
}

double get_num(const json& obj, const std::string& path, const char* key,
               double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(path + "/" + key, "expected a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) fail(path + "/" + key, "expected an integer");
    return obj[key].get<int>();
}

// shortest decimal form that round-trips a double, for byte-stable output
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back = 0.0;
    for (int prec = 1; prec <= 16; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof probe, "%.*g", prec, v);
        std::sscanf(probe, "%lf", &back);
        if (back == v) return probe;
    }
    return buf;
}

struct SvgSeries {
    std::string color;
    std::vector<std::pair<double, double>> pts;
    std::string label;
};

void write_svg(const std::string& path, const std::string& title,
               const std::string& xlabel, const std::string& ylabel,
               std::vector<SvgSeries> series, bool logx, bool logy) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto& s : series)
        for (auto& [x, y] : s.pts) {
            double px = logx ? std::log10(std::max(x, 1e-300)) : x;
            double py = logy ? std::log10(std::max(y, 1e-300)) : y;
            xmin = std::min(xmin, px), xmax = std::max(xmax, px);
            ymin = std::min(ymin, py), ymax = std::max(ymax, py);
        }
    if (xmin > xmax) xmin = 0, xmax = 1;
    if (ymin > ymax) ymin = 0, ymax = 1;
    if (xmax - xmin < 1e-12) xmax = xmin + 1;
    if (ymax - ymin < 1e-12) ymax = ymin + 1;
    const double W = 640, H = 440, L = 70, R = 20, T = 40, B = 50;
    auto px = [&](double x) {
        double v = logx ? std::log10(std::max(x, 1e-300)) : x;
        return L + (v - xmin) / (xmax - xmin) * (W - L - R);
    };
    auto py = [&](double y) {
        double v = logy ? std::log10(std::max(y, 1e-300)) : y;
        return H - B - (v - ymin) / (ymax - ymin) * (H - T - B);
    };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R
      << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n"
      << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << xlabel << (logx ? " (log)" : "") << "</text>\n"
      << "<text x=\"16\" y=\"" << H / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 "
      << H / 2 << ")\">" << ylabel << (logy ? " (log)" : "") << "</text>\n";
    // four tick labels per axis
    for (int k = 0; k <= 3; ++k) {
        const double fx = xmin + (xmax - xmin) * k / 3.0;
        const double fy = ymin + (ymax - ymin) * k / 3.0;
        const double gx = L + (W - L - R) * k / 3.0;
        const double gy = H - B - (H - T - B) * k / 3.0;
        o << "<text x=\"" << gx << "\" y=\"" << H - B + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"10\">"
          << fmt(logx ? std::pow(10.0, fx) : fx) << "</text>\n"
          << "<text x=\"" << L - 6 << "\" y=\"" << gy + 3
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
          << fmt(logy ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    int li = 0;
    for (const auto& s : series) {
        o << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"";
        for (auto& [x, y] : s.pts) o << px(x) << "," << py(y) << " ";
        o << "\"/>\n";
        for (auto& [x, y] : s.pts)
            o << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
              << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
        if (!s.label.empty())
            o << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 + 14 * li++
              << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
                 "font-size=\"11\" fill=\""
              << s.color << "\">" << s.label << "</text>\n";
    }
    o << "</svg>\n";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << o.str();
}

const char* palette(int i) {
    static const char* c[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                              "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return c[i % 8];
}

void put_doubles(std::ofstream& f, const double* p, size_t n) {
    f.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * 8));
}
void get_doubles(std::ifstream& f, double* p, size_t n) {
    f.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * 8));
    if (!f) throw std::runtime_error("checkpoint: truncated file");
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) fail("", "top level must be an object");
    reject_unknown(doc, "", {"geometry", "discretization", "physics", "norms", "output"});

    RunConfig cfg;
    auto& p = cfg.plan;

    const json geo = doc.value("geometry", json::object());
    reject_unknown(geo, "geometry", {"curve", "lambda"});
    if (geo.contains("curve") && geo["curve"] != "disk")
        fail("geometry/curve", "only \"disk\" is supported");
    p.lambda = get_num(geo, "geometry", "lambda", 0.1);

    const json dis = doc.value("discretization", json::object());
    reject_unknown(dis, "discretization", {"n_theta", "n_z", "h", "dt"});
    p.n_theta = get_int(dis, "discretization", "n_theta", 128);
    p.n_z = get_int(dis, "discretization", "n_z", 256);
    p.dt = get_num(dis, "discretization", "dt", 0.0);
    const double h = get_num(dis, "discretization", "h", 0.0);
    if (h > 0.0 && p.lambda > 0.0 && p.lambda < 1.0 && p.n_z > 0) {
        // the nested-grid construction derives the interior spacing from n_z
        const auto chart = geometry::ScaledChart(
            geometry::GeodesicChart(geometry::BoundaryCurve::circle(1.0)), p.lambda);
        const double implied = chart.strip_depth() * 4.0 / 3.0 / (p.lambda * p.n_z);
        if (std::abs(h - implied) > 0.05 * implied)
            fail("discretization/h",
                 "inconsistent with the nested grids implied by n_z (expected " +
                     fmt(implied) + ")");
    }

    const json phy = doc.value("physics", json::object());
    reject_unknown(phy, "physics", {"nu", "nus", "T", "ic", "records"});
    if (phy.contains("nus")) {
        if (!phy["nus"].is_array()) fail("physics/nus", "expected an array");
        p.nus.clear();
        for (const auto& v : phy["nus"]) {
            if (!v.is_number()) fail("physics/nus", "expected numbers");
            p.nus.push_back(v.get<double>());
        }
    } else if (phy.contains("nu")) {
        p.nus = {get_num(phy, "physics", "nu", 1e-2)};
    }
    p.T = get_num(phy, "physics", "T", 0.5);
    p.n_records = get_int(phy, "physics", "records", 25);
    const json ic = phy.value("ic", json::object());
    reject_unknown(ic, "physics/ic", {"name", "amp", "modes"});
    if (ic.contains("name")) {
        if (!ic["name"].is_string()) fail("physics/ic/name", "expected a string");
        p.ic = ic["name"].get<std::string>();
    }
    p.ic_amp = get_num(ic, "physics/ic", "amp", 0.05);
    p.ic_modes.clear();
    if (ic.contains("modes")) {
        if (!ic["modes"].is_array()) fail("physics/ic/modes", "expected an array");
        for (const auto& mj : ic["modes"]) {
            if (!mj.is_object()) fail("physics/ic/modes", "expected objects");
            reject_unknown(mj, "physics/ic/modes", {"alpha", "amp"});
            p.ic_modes.emplace_back(get_int(mj, "physics/ic/modes", "alpha", 0),
                                    get_num(mj, "physics/ic/modes", "amp", 0.0));
        }
    }

    const json nrm = doc.value("norms", json::object());
    reject_unknown(nrm, "norms", {"eps0", "rho0", "rho", "zeta", "beta"});
    p.norms.eps0 = get_num(nrm, "norms", "eps0", 0.25);
    p.norms.rho0 = get_num(nrm, "norms", "rho0", 0.09);
    p.norms.rho = get_num(nrm, "norms", "rho", 0.045);
    p.norms.zeta = get_num(nrm, "norms", "zeta", 0.5);
    p.norms.beta = get_num(nrm, "norms", "beta", 1.0);

    const json out = doc.value("output", json::object());
    reject_unknown(out, "output", {"dir", "checkpoint_every", "plots", "threads"});
    if (out.contains("dir")) {
        if (!out["dir"].is_string()) fail("output/dir", "expected a string");
        p.output = out["dir"].get<std::string>();
    }
    p.checkpoint_every = get_int(out, "output", "checkpoint_every", 0);
    if (out.contains("plots")) {
        if (!out["plots"].is_boolean()) fail("output/plots", "expected a boolean");
        p.plots = out["plots"].get<bool>();
    }
    if (out.contains("threads")) p.threads = get_int(out, "output", "threads", -1);

    experiments::validate_plan(p);
    if (!(p.norms.rho > 0.0 && p.norms.rho < p.norms.rho0))
        fail("norms/rho", "must lie in (0, rho0)");
    if (p.checkpoint_every < 0) fail("output/checkpoint_every", "must be >= 0");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string config_json(const RunConfig& cfg) {
    const auto& p = cfg.plan;
    json doc;
    doc["geometry"] = {{"curve", "disk"}, {"lambda", p.lambda}};
    doc["discretization"] = {{"n_theta", p.n_theta}, {"n_z", p.n_z}, {"dt", p.dt}};
    json ic = {{"name", p.ic}, {"amp", p.ic_amp}};
    if (!p.ic_modes.empty()) {
        json modes = json::array();
        for (const auto& [a, amp] : p.ic_modes)
            modes.push_back({{"alpha", a}, {"amp", amp}});
        ic["modes"] = modes;
    }
    doc["physics"] = {
        {"nus", p.nus}, {"T", p.T}, {"records", p.n_records}, {"ic", ic}};
    doc["norms"] = {{"eps0", p.norms.eps0},
                    {"rho0", p.norms.rho0},
                    {"rho", p.norms.rho},
                    {"zeta", p.norms.zeta},
                    {"beta", p.norms.beta}};
    json out = {{"checkpoint_every", p.checkpoint_every}, {"plots", p.plots}};
    if (!p.output.empty()) out["dir"] = p.output;
    if (p.threads >= 0) out["threads"] = p.threads;
    doc["output"] = out;
    return doc.dump(2) + "\n";
}

std::string csv_header() {
    return "t,nu,l2_diff,bdry_vort,kato_integrand,kato_integral,gronwall_rhs,"
           "energy_lhs,energy_rhs,euler_diss,grad_bound,l1_rho,w11,w21,"
           "h4_interior,a_beta";
}

namespace {

void write_csv(std::span<const experiments::ExperimentRecord> records,
               const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << csv_header() << "\n";
    for (const auto& r : records) {
        f << fmt(r.t) << ',' << fmt(r.nu) << ',' << fmt(r.l2_diff) << ','
          << fmt(r.bdry_vort) << ',' << fmt(r.kato_integrand) << ','
          << fmt(r.kato_integral) << ',' << fmt(r.gronwall_rhs) << ','
          << fmt(r.energy_lhs) << ',' << fmt(r.energy_rhs) << ','
          << fmt(r.euler_diss) << ',' << fmt(r.grad_bound) << ',' << fmt(r.l1_rho)
          << ',' << fmt(r.w11) << ',' << fmt(r.w21) << ',' << fmt(r.h4_interior)
          << ',' << fmt(r.a_beta) << "\n";
    }
}

/// Per-viscosity summaries in first-appearance order.
struct NuGroup {
    double nu;
    std::vector<const experiments::ExperimentRecord*> rows;
};

std::vector<NuGroup> group_by_nu(std::span<const experiments::ExperimentRecord> rs) {
    std::vector<NuGroup> groups;
    for (const auto& r : rs) {
        if (groups.empty() || groups.back().nu != r.nu) groups.push_back({r.nu, {}});
        groups.back().rows.push_back(&r);
    }
    return groups;
}

} // namespace

void write_report(std::span<const experiments::ExperimentRecord> records,
                  std::span<const experiments::RunSummary> runs,
                  const experiments::RateFit& rate, const std::string& dir,
                  bool plots) {
    fs::create_directories(dir);
    write_csv(records, (fs::path(dir) / "records.csv").string());

    const auto groups = group_by_nu(records);
    json checks;
    {
        std::vector<double> sup_l2, sup_bdry, kato_final;
        for (const auto& g : groups) {
            double l2 = 0.0, bd = 0.0;
            for (auto* r : g.rows) {
                l2 = std::max(l2, r->l2_diff);
                bd = std::max(bd, r->bdry_vort);
            }
            sup_l2.push_back(l2);
            sup_bdry.push_back(bd);
            kato_final.push_back(g.rows.empty() ? 0.0
                                                : std::abs(g.rows.back()->kato_integral));
        }
        const auto [bmin, bmax] =
            sup_bdry.empty() ? std::pair{0.0, 0.0}
                             : std::pair{*std::min_element(sup_bdry.begin(),
                                                           sup_bdry.end()),
                                         *std::max_element(sup_bdry.begin(),
                                                           sup_bdry.end())};
        checks["bdry_vort_ratio"] = bmin > 0.0 ? bmax / bmin : 0.0;
        bool kato_dec = kato_final.size() >= 2;
        for (size_t i = 1; i < kato_final.size(); ++i)
            kato_dec = kato_dec && kato_final[i] < kato_final[i - 1];
        checks["kato_strictly_decreasing"] = kato_dec;
        checks["kato_smallest_over_largest"] =
            (!kato_final.empty() && kato_final.front() > 0.0)
                ? kato_final.back() / kato_final.front()
                : 0.0;
        bool l2_mono = true;
        for (size_t i = 1; i < sup_l2.size(); ++i)
            l2_mono = l2_mono && sup_l2[i] <= sup_l2[i - 1] * 1.05;
        checks["l2_diff_nonincreasing"] = l2_mono;
        double min_margin = 0.0;
        bool first = true;
        for (const auto& sp : experiments::stability_check(records)) {
            if (first || sp.margin < min_margin) min_margin = sp.margin;
            first = false;
        }
        checks["stability_min_margin"] = min_margin;
        double max_slack = 0.0;
        for (const auto& s : runs) max_slack = std::max(max_slack, s.max_energy_slack);
        checks["max_energy_slack"] = max_slack;
        checks["rate_exponent"] = rate.exponent;
    }

    json summary;
    summary["records"] = records.size();
    summary["rate"] = {{"exponent", rate.exponent},
                       {"confidence", rate.confidence},
                       {"points_used", rate.used}};
    json jruns = json::array();
    for (const auto& s : runs)
        jruns.push_back({{"nu", s.nu},
                         {"dt", s.dt},
                         {"steps", s.steps},
                         {"max_energy_slack", s.max_energy_slack},
                         {"spectral_tail", s.spectral_tail},
                         {"completed", s.completed},
                         {"note", s.note}});
    summary["runs"] = jruns;
    summary["checks"] = checks;
    {
        std::ofstream f(fs::path(dir) / "summary.json", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write summary.json");
        f << summary.dump(2) << "\n";
    }

    if (!plots) return;
    const fs::path pd = fs::path(dir) / "plots";
    fs::create_directories(pd);
    {
        std::vector<SvgSeries> s1{{palette(0), {}, "sup_t ||u_nu - u_E||"}};
        std::vector<SvgSeries> s2{{palette(1), {}, "sqrt(nu) sup |omega| on wall"}};
        std::vector<SvgSeries> s3{{palette(2), {}, "|Kato integral|(T)"}};
        for (const auto& g : groups) {
            double l2 = 0.0, bd = 0.0;
            for (auto* r : g.rows) {
                l2 = std::max(l2, r->l2_diff);
                bd = std::max(bd, r->bdry_vort);
            }
            s1[0].pts.emplace_back(g.nu, l2);
            s2[0].pts.emplace_back(g.nu, bd);
            if (!g.rows.empty())
                s3[0].pts.emplace_back(g.nu, std::abs(g.rows.back()->kato_integral));
        }
        write_svg((pd / "l2_vs_nu.svg").string(), "Inviscid convergence", "nu",
                  "metric", s1, true, true);
        write_svg((pd / "bdry_vort_vs_nu.svg").string(),
                  "Boundary vorticity diagnostic", "nu", "metric", s2, true, false);
        write_svg((pd / "kato_vs_nu.svg").string(), "Kato criterion", "nu", "metric",
                  s3, true, true);
    }
    {
        std::vector<SvgSeries> series;
        int i = 0;
        for (const auto& g : groups) {
            SvgSeries s{palette(i++), {}, "nu = " + fmt(g.nu)};
            for (auto* r : g.rows) s.pts.emplace_back(r->t, r->l2_diff);
            series.push_back(std::move(s));
        }
        write_svg((fs::path(pd) / "l2_vs_t.svg").string(), "L2 distance to Euler",
                  "t", "||u_nu - u_E||", series, false, false);
    }
}

std::vector<experiments::ExperimentRecord> read_records_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
    if (line != csv_header())
        throw std::runtime_error(path + ": unexpected CSV header");
    std::vector<experiments::ExperimentRecord> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 16) throw std::runtime_error(path + ": malformed row");
        experiments::ExperimentRecord r;
        r.t = v[0];
        r.nu = v[1];
        r.l2_diff = v[2];
        r.bdry_vort = v[3];
        r.kato_integrand = v[4];
        r.kato_integral = v[5];
        r.gronwall_rhs = v[6];
        r.energy_lhs = v[7];
        r.energy_rhs = v[8];
        r.euler_diss = v[9];
        r.grad_bound = v[10];
        r.l1_rho = v[11];
        r.w11 = v[12];
        r.w21 = v[13];
        r.h4_interior = v[14];
        r.a_beta = v[15];
        out.push_back(r);
    }
    return out;
}

void render_report_dir(const std::string& dir) {
    const auto records = read_records_csv((fs::path(dir) / "records.csv").string());
    // summaries are re-derived from the rows; step-level diagnostics are not
    // stored in the CSV and stay at their defaults here
    std::vector<experiments::RunSummary> runs;
    for (const auto& g : group_by_nu(records)) {
        experiments::RunSummary s;
        s.nu = g.nu;
        s.steps = static_cast<int>(g.rows.size()) - 1;
        runs.push_back(s);
    }
    std::vector<std::pair<double, double>> pairs;
    for (const auto& g : group_by_nu(records)) {
        double sup = 0.0;
        for (auto* r : g.rows) sup = std::max(sup, r->l2_diff);
        pairs.emplace_back(g.nu, sup);
    }
    write_report(records, runs, experiments::fit_rate(pairs), dir, true);
}

void save_state(const solver::SolverState& s, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot write " + path);
    f.write("VXLBCKP1", 8);
    const auto& zg = s.omega_b.zgrid();
    const auto& rg = s.omega_i.rgrid;
    const double head[6] = {s.t,
                            s.nu,
                            s.trace_decay,
                            s.decay_warning ? 1.0 : 0.0,
                            static_cast<double>(s.omega_b.n_theta()),
                            static_cast<double>(zg.size())};
    put_doubles(f, head, 6);
    put_doubles(f, zg.data(), zg.size());
    const double nr = static_cast<double>(rg.size());
    put_doubles(f, &nr, 1);
    put_doubles(f, rg.data(), rg.size());
    put_doubles(f, reinterpret_cast<const double*>(s.omega_b.raw().data()),
                2 * s.omega_b.raw().size());
    put_doubles(f, reinterpret_cast<const double*>(s.omega_i.data.data()),
                2 * s.omega_i.data.size());
}

solver::SolverState load_state(const std::string& path,
                               std::shared_ptr<const geometry::ScaledChart> chart) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot read " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::string(magic, 8) != "VXLBCKP1")
        throw std::runtime_error("checkpoint: bad magic in " + path);
    double head[6];
    get_doubles(f, head, 6);
    const int n_theta = static_cast<int>(head[4]);
    std::vector<double> zg(static_cast<size_t>(head[5]));
    get_doubles(f, zg.data(), zg.size());
    double nr = 0;
    get_doubles(f, &nr, 1);
    std::vector<double> rg(static_cast<size_t>(nr));
    get_doubles(f, rg.data(), rg.size());
    solver::SolverState s{head[0], head[1], fields::ModeField(chart, zg, n_theta),
                          elliptic::RadialField(rg, n_theta), head[2], head[3] != 0.0};
    get_doubles(f, reinterpret_cast<double*>(s.omega_b.raw().data()),
                2 * s.omega_b.raw().size());
    get_doubles(f, reinterpret_cast<double*>(s.omega_i.data.data()),
                2 * s.omega_i.data.size());
    return s;
}

} // namespace vortexlab::cli_io
