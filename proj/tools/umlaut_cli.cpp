#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "umlaut/coding.hpp"
#include "umlaut/document.hpp"
#include "umlaut/optim.hpp"

using namespace umlaut;
using nlohmann::json;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    double tol = 1e-10;
    int max_iter = 10000;
    std::string base = "nats";
    bool pretty = false;
    bool verify = false;
    int jobs = 1;

    double conv() const { return base == "bits" ? 1.0 / std::log(2.0) : 1.0; }
    OptimizerOptions optimizer() const { return {seed, max_iter, tol}; }
};

DocumentEnvelope load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_document(ss.str());
}

const DocumentEnvelope& expect_kind(const DocumentEnvelope& doc, const std::string& kind,
                                    const std::string& path) {
    if (doc.kind != kind)
        throw SchemaError(path + ": expected a document of kind \"" + kind + "\"");
    return doc;
}

json complex_matrix_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

json real_matrix_json(const RealMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json value_json(const ExtendedReal& v, const GlobalOpts& g) {
    if (v.is_inf) return "inf";
    return v.value * g.conv();
}

json diagnostics_json(const Diagnostics& d) {
    json j;
    j["iterations"] = d.iterations;
    j["residual"] = d.residual;
    j["converged"] = d.converged;
    j["heuristic"] = d.heuristic;
    if (!d.start_values.empty()) j["start_values"] = d.start_values;
    if (!d.warnings.empty()) j["warnings"] = d.warnings;
    return j;
}

void emit(json j, const GlobalOpts& g) {
    std::cout << (g.pretty ? j.dump(2) : j.dump()) << "\n";
}

RealVector parse_prob_list(const std::string& text, Eigen::Index want) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (want >= 0 && Eigen::Index(vals.size()) != want)
        throw SchemaError("probability list has wrong length");
    RealVector p(Eigen::Index(vals.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = vals[size_t(i)];
    if (p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-9)
        throw InvariantError("probability list must be nonnegative and sum to 1");
    return p;
}

Channel cq_to_channel(const std::vector<DensityOperator>& states) {
    const Eigen::Index n = Eigen::Index(states.size());
    const Eigen::Index d = states.front().dim();
    ComplexMatrix j = ComplexMatrix::Zero(n * d, n * d);
    for (Eigen::Index x = 0; x < n; ++x)
        j.block(x * d, x * d, d, d) = states[size_t(x)].matrix();
    return Channel(n, d, HermitianOperator(j), CqStructure{states});
}

int run(int argc, char** argv) {
    CLI::App app{"umlaut information toolkit"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--seed", g.seed, "optimizer seed");
    app.add_option("--tol", g.tol, "optimizer tolerance");
    app.add_option("--max-iter", g.max_iter, "optimizer iteration cap");
    app.add_option("--base", g.base, "output unit")->check(CLI::IsMember({"nats", "bits"}));
    app.add_flag("--pretty", g.pretty, "pretty-print JSON output");
    app.add_flag("--verify", g.verify, "also run the independent cross-check");
    app.add_option("--jobs", g.jobs, "sweep worker cap")->check(CLI::PositiveNumber);

    std::string file, file2, alpha_file;
    double alpha = 0.5, eps = 0.1;
    int kk = 2, nn = 1, messages = 2;
    bool use_bs = false;
    std::string plist, qlist, keep_list;
    std::string param = "p", range = "0:1:0.01", quantity = "restricted-umlaut", out_path;

    auto* c_su = app.add_subcommand("state-umlaut", "umlaut information of a state");
    c_su->add_option("file", file)->required();
    auto* c_sa = app.add_subcommand("state-umlaut-alpha", "Petz-Renyi alpha-umlaut");
    c_sa->add_option("file", file)->required();
    c_sa->add_option("--alpha", alpha)->required();
    auto* c_sb = app.add_subcommand("state-bs-umlaut", "geometric umlaut of a state");
    c_sb->add_option("file", file)->required();
    auto* c_la = app.add_subcommand("lautum", "lautum information");
    c_la->add_option("file", file)->required();
    c_la->add_flag("--bs", use_bs, "use the geometric divergence");
    auto* c_cu = app.add_subcommand("channel-umlaut", "umlaut information of a channel");
    c_cu->add_option("file", file)->required();
    auto* c_cq = app.add_subcommand("cq-umlaut", "umlaut information of a CQ channel");
    c_cq->add_option("file", file)->required();
    auto* c_cb = app.add_subcommand("channel-bs-umlaut", "geometric channel umlaut");
    c_cb->add_option("file", file)->required();
    auto* c_el = app.add_subcommand("ell", "lower umlaut information");
    c_el->add_option("file", file)->required();
    c_el->add_option("--k", kk)->required();
    c_el->add_option("--p", plist);
    c_el->add_option("--q", qlist);
    auto* c_ch = app.add_subcommand("chernoff", "Chernoff-type lower bound");
    c_ch->add_option("file", file)->required();
    c_ch->add_option("--p", plist);
    auto* c_tc = app.add_subcommand("two-copy", "two-copy lower bound");
    c_tc->add_option("channel", file)->required();
    c_tc->add_option("state", file2)->required();
    auto* c_gm = app.add_subcommand("gaussian-umlaut-marginal", "Gaussian umlaut-marginal");
    c_gm->add_option("file", file)->required();
    c_gm->add_option("--keep", keep_list)->required();
    auto* c_dh = app.add_subcommand("dh", "hypothesis-testing divergence");
    c_dh->add_option("rho", file)->required();
    c_dh->add_option("sigma", file2);
    c_dh->add_option("--eps", eps)->required();
    auto* c_ns = app.add_subcommand("ns-meta", "non-signalling meta-converse");
    c_ns->add_option("file", file)->required();
    c_ns->add_option("--messages", messages)->required();
    auto* c_sn = app.add_subcommand("sanov-n", "finite-n Sanov estimate");
    c_sn->add_option("file", file)->required();
    c_sn->add_option("--eps", eps)->required();
    c_sn->add_option("--n", nn)->required();
    auto* c_sw = app.add_subcommand("sweep", "parameter sweep to CSV");
    c_sw->add_option("--param", param);
    c_sw->add_option("--range", range)->required();
    c_sw->add_option("--channel", file)->required();
    c_sw->add_option("--quantity", quantity);
    c_sw->add_option("--out", out_path)->required();

    for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
        sc->fallthrough();
    CLI11_PARSE(app, argc, argv);
    OptimizerOptions oo = g.optimizer();

    if (c_su->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "state", file);
        UmlautResult r = umlaut_information(*doc.state);
        json j{{"quantity", "state-umlaut"}, {"value", value_json(r.value, g)}, {"unit", g.base}};
        if (r.optimizer_sigma) j["optimizer"] = complex_matrix_json(r.optimizer_sigma->matrix());
        j["diagnostics"] = diagnostics_json(r.diagnostics);
        if (g.verify && !r.value.is_inf) {
            UmlautResult d = umlaut_information_direct(*doc.state, oo);
            double gap = std::abs(d.value.value - r.value.value);
            j["verify"] = {{"oracle", "direct-optimization"}, {"gap", gap},
                           {"agree", gap <= 1e-6}};
        }
        emit(j, g);
    } else if (c_sa->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "state", file);
        UmlautResult r = petz_umlaut(*doc.state, alpha);
        json j{{"quantity", "state-umlaut-alpha"}, {"alpha", alpha},
               {"value", value_json(r.value, g)}, {"unit", g.base}};
        if (r.optimizer_sigma) j["optimizer"] = complex_matrix_json(r.optimizer_sigma->matrix());
        j["diagnostics"] = diagnostics_json(r.diagnostics);
        emit(j, g);
    } else if (c_sb->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "state", file);
        UmlautResult r = bs_umlaut_state(*doc.state, oo);
        json j{{"quantity", "state-bs-umlaut"}, {"value", value_json(r.value, g)},
               {"unit", g.base}};
        if (r.optimizer_sigma) j["optimizer"] = complex_matrix_json(r.optimizer_sigma->matrix());
        j["diagnostics"] = diagnostics_json(r.diagnostics);
        if (g.verify && !r.value.is_inf) {
            // the geometric umlaut upper-bounds the Umegaki umlaut
            ExtendedReal u = umlaut_information(*doc.state).value;
            bool ok = r.value.value >= u.or_inf() - 1e-8;
            j["verify"] = {{"oracle", "umegaki-lower-bound"}, {"agree", ok}};
        }
        emit(j, g);
    } else if (c_la->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "state", file);
        ExtendedReal v = use_bs ? bs_lautum(*doc.state) : lautum(*doc.state);
        emit(json{{"quantity", use_bs ? "bs-lautum" : "lautum"},
                  {"value", value_json(v, g)}, {"unit", g.base},
                  {"diagnostics", json::object()}}, g);
    } else if (c_cu->parsed()) {
        DocumentEnvelope doc = load(file);
        if (doc.kind == "cq_channel") {
            ChannelUmlautResult r = cq_channel_umlaut(doc.cq_states, oo);
            json j{{"quantity", "channel-umlaut"}, {"value", value_json(r.value, g)},
                   {"unit", g.base}, {"diagnostics", diagnostics_json(r.diagnostics)}};
            if (g.verify && !r.value.is_inf) {
                ChannelUmlautResult d = cq_channel_umlaut_dual(doc.cq_states, oo);
                double gap = std::abs(d.value.or_inf() - r.value.value);
                j["verify"] = {{"oracle", "dual"}, {"gap", gap}, {"agree", gap <= 1e-5}};
            }
            emit(j, g);
        } else {
            expect_kind(doc, "channel", file);
            const Channel& ch = *doc.channel;
            ChannelUmlautResult r =
                ch.covariant ? channel_umlaut_covariant(ch, oo) : channel_umlaut(ch, oo);
            json j{{"quantity", "channel-umlaut"}, {"value", value_json(r.value, g)},
                   {"unit", g.base}, {"diagnostics", diagnostics_json(r.diagnostics)}};
            if (r.optimizer_rho) j["optimizer"] = complex_matrix_json(r.optimizer_rho->matrix());
            if (g.verify && ch.covariant && !r.value.is_inf) {
                ChannelUmlautResult u = channel_umlaut(ch, oo);
                double gap = std::abs(u.value.or_inf() - r.value.value);
                j["verify"] = {{"oracle", "unrestricted-ascent"}, {"gap", gap},
                               {"agree", gap <= 1e-5}};
            }
            emit(j, g);
        }
    } else if (c_cq->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "cq_channel", file);
        ChannelUmlautResult r = cq_channel_umlaut(doc.cq_states, oo);
        json j{{"quantity", "cq-umlaut"}, {"value", value_json(r.value, g)},
               {"unit", g.base}, {"diagnostics", diagnostics_json(r.diagnostics)}};
        if (r.optimizer_rho) j["optimizer"] = complex_matrix_json(r.optimizer_rho->matrix());
        if (g.verify && !r.value.is_inf) {
            ChannelUmlautResult d = cq_channel_umlaut_dual(doc.cq_states, oo);
            double gap = std::abs(d.value.or_inf() - r.value.value);
            j["verify"] = {{"oracle", "dual"}, {"gap", gap}, {"agree", gap <= 1e-5}};
        }
        emit(j, g);
    } else if (c_cb->parsed()) {
        DocumentEnvelope doc = load(file);
        Channel ch = doc.kind == "cq_channel" ? cq_to_channel(doc.cq_states)
                                              : *expect_kind(doc, "channel", file).channel;
        ChannelUmlautResult r = bs_channel_umlaut(ch, oo);
        json j{{"quantity", "channel-bs-umlaut"}, {"value", value_json(r.value, g)},
               {"unit", g.base}, {"diagnostics", diagnostics_json(r.diagnostics)}};
        if (g.verify && !r.value.is_inf) {
            ChannelUmlautResult u = ch.covariant ? channel_umlaut_covariant(ch, oo)
                                                 : channel_umlaut(ch, oo);
            bool ok = r.value.value >= u.value.or_inf() - 1e-5;
            j["verify"] = {{"oracle", "umegaki-lower-bound"}, {"agree", ok}};
        }
        emit(j, g);
    } else if (c_el->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "cq_channel", file);
        Eigen::Index n = Eigen::Index(doc.cq_states.size());
        RealVector p = plist.empty() ? RealVector::Constant(n, 1.0 / double(n))
                                     : parse_prob_list(plist, n);
        RealVector q = qlist.empty() ? RealVector::Constant(kk, 1.0 / double(kk))
                                     : parse_prob_list(qlist, kk);
        double v = lower_umlaut_ell(doc.cq_states, p, kk, q);
        json j{{"quantity", "ell"}, {"k", kk}, {"value", v * g.conv()}, {"unit", g.base},
               {"diagnostics", json::object()}};
        if (g.verify) {
            double u = cq_umlaut_at(doc.cq_states, p);
            j["verify"] = {{"oracle", "cq-umlaut-upper-bound"},
                           {"agree", v <= u + 1e-9}};
        }
        emit(j, g);
    } else if (c_ch->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "cq_channel", file);
        Eigen::Index n = Eigen::Index(doc.cq_states.size());
        RealVector p = plist.empty() ? RealVector::Constant(n, 1.0 / double(n))
                                     : parse_prob_list(plist, n);
        ExtendedReal v = chernoff_lower_bound(doc.cq_states, p);
        emit(json{{"quantity", "chernoff"}, {"value", value_json(v, g)}, {"unit", g.base},
                  {"diagnostics", json::object()}}, g);
    } else if (c_tc->parsed()) {
        DocumentEnvelope cdoc = load(file), sdoc = load(file2);
        expect_kind(cdoc, "channel", file);
        expect_kind(sdoc, "state", file2);
        double v = two_copy_lower_bound(*cdoc.channel, sdoc.state->rho);
        emit(json{{"quantity", "two-copy"}, {"value", v * g.conv()}, {"unit", g.base},
                  {"diagnostics", json::object()}}, g);
    } else if (c_gm->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "gaussian", file);
        std::vector<Eigen::Index> keep;
        std::stringstream ss(keep_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) keep.push_back(std::stoll(tok));
        GaussianState m = gaussian_umlaut_marginal(*doc.gaussian, keep);
        json mean = json::array();
        for (Eigen::Index i = 0; i < m.mean.size(); ++i) mean.push_back(m.mean(i));
        emit(json{{"quantity", "gaussian-umlaut-marginal"}, {"modes", m.modes},
                  {"mean", std::move(mean)}, {"hamiltonian", real_matrix_json(m.hamiltonian)},
                  {"covariance", real_matrix_json(m.covariance)},
                  {"diagnostics", json::object()}}, g);
    } else if (c_dh->parsed()) {
        DocumentEnvelope rdoc = load(file);
        expect_kind(rdoc, "state", file);
        DensityOperator rho = rdoc.state->rho;
        DensityOperator sigma = rho;
        if (!file2.empty()) {
            DocumentEnvelope sdoc = load(file2);
            expect_kind(sdoc, "state", file2);
            sigma = sdoc.state->rho;
        }
        ExtendedReal v = hypothesis_testing_divergence(rho, sigma, eps);
        json j{{"quantity", "dh"}, {"eps", eps}, {"value", value_json(v, g)},
               {"unit", g.base}, {"diagnostics", json::object()}};
        if (g.verify && rho.dim() <= 16 && !v.is_inf) {
            ExtendedReal pr = hypothesis_testing_primal_sdp(rho, sigma, eps);
            double gap = std::abs(pr.or_inf() - v.value);
            j["verify"] = {{"oracle", "sdp-primal"}, {"gap", gap}, {"agree", gap <= 1e-6}};
        }
        emit(j, g);
    } else if (c_ns->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "channel", file);
        NsErrorResult r = ns_error_probability(*doc.channel, messages);
        if (r.sdp.status != "optimal")
            throw ConvergenceError("ns-meta: SDP did not reach optimality");
        emit(json{{"quantity", "ns-meta"}, {"messages", messages}, {"epsilon", r.epsilon},
                  {"value", value_json(r.meta_converse, g)}, {"unit", g.base},
                  {"diagnostics", {{"sdp_status", r.sdp.status}, {"sdp_gap", r.sdp.gap}}}}, g);
    } else if (c_sn->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "state", file);
        SanovEstimate e = sanov_finite_n_estimate(*doc.state, eps, nn, oo);
        emit(json{{"quantity", "sanov-n"}, {"n", nn}, {"eps", eps},
                  {"value", e.value * g.conv()}, {"unit", g.base},
                  {"diagnostics", {{"caveat", e.caveat}}}}, g);
    } else if (c_sw->parsed()) {
        DocumentEnvelope doc = load(file);
        expect_kind(doc, "channel", file);
        if (quantity != "restricted-umlaut")
            throw SchemaError("sweep: unknown quantity \"" + quantity + "\"");
        if (doc.channel->d_in != 2) throw InvariantError("sweep: needs a qubit-input channel");
        double a = 0, b = 1, step = 0.01;
        if (std::sscanf(range.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0)
            throw SchemaError("sweep: range must be start:stop:step");
        std::vector<double> ps;
        for (double v = a; v <= b + 1e-12; v += step) ps.push_back(std::min(v, b));
        std::vector<ExtendedReal> vals(ps.size(), ExtendedReal::finite(0.0));
        const Channel& ch = *doc.channel;
        auto work = [&](size_t lo, size_t hi) {
            for (size_t i = lo; i < hi; ++i) {
                ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
                rho(0, 0) = ps[i];
                rho(1, 1) = 1.0 - ps[i];
                vals[i] = umlaut_information(output_state(ch, DensityOperator(rho))).value;
            }
        };
        size_t jobs = std::max(1, g.jobs);
        std::vector<std::thread> pool;
        size_t chunk = (ps.size() + jobs - 1) / jobs;
        for (size_t w = 0; w < jobs; ++w) {
            size_t lo = w * chunk, hi = std::min(ps.size(), lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& t : pool) t.join();
        std::ofstream out(out_path);
        if (!out) throw SchemaError(out_path + ": cannot open output file");
        out << param << ",value\n";
        char buf[64];
        for (size_t i = 0; i < ps.size(); ++i) {
            if (vals[i].is_inf) {
                std::snprintf(buf, sizeof buf, "%.10g,inf\n", ps[i]);
            } else {
                std::snprintf(buf, sizeof buf, "%.10g,%.12g\n", ps[i],
                              vals[i].value * g.conv());
            }
            out << buf;
        }
        emit(json{{"quantity", "sweep"}, {"rows", ps.size()}, {"out", out_path},
                  {"diagnostics", json::object()}}, g);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
