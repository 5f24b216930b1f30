#include "umlaut/document.hpp"

#include <json.hpp>

namespace umlaut {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

const json& field(const json& j, const std::string& path, const char* name) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(name);
    if (it == j.end()) fail(path + "." + name, "missing field");
    return *it;
}

Eigen::Index int_field(const json& j, const std::string& path, const char* name) {
    const json& v = field(j, path, name);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        fail(path + "." + name, "expected a positive integer");
    return Eigen::Index(v.get<long long>());
}

Complex parse_complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(path, "expected a complex entry [re, im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

ComplexMatrix parse_complex_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty matrix");
    const Eigen::Index rows = Eigen::Index(j.size());
    Eigen::Index cols = -1;
    ComplexMatrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[size_t(r)];
        std::string rp = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.empty()) fail(rp, "expected a matrix row");
        if (cols < 0) {
            cols = Eigen::Index(row.size());
            m.resize(rows, cols);
        } else if (Eigen::Index(row.size()) != cols) {
            fail(rp, "ragged matrix row");
        }
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = parse_complex(row[size_t(c)], rp + "[" + std::to_string(c) + "]");
    }
    return m;
}

RealMatrix parse_real_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty matrix");
    const Eigen::Index rows = Eigen::Index(j.size());
    Eigen::Index cols = -1;
    RealMatrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[size_t(r)];
        std::string rp = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.empty()) fail(rp, "expected a matrix row");
        if (cols < 0) {
            cols = Eigen::Index(row.size());
            m.resize(rows, cols);
        } else if (Eigen::Index(row.size()) != cols) {
            fail(rp, "ragged matrix row");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!row[size_t(c)].is_number())
                fail(rp + "[" + std::to_string(c) + "]", "expected a real number");
            m(r, c) = row[size_t(c)].get<double>();
        }
    }
    return m;
}

RealVector parse_real_vector(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    RealVector v(Eigen::Index(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!j[size_t(i)].is_number())
            fail(path + "[" + std::to_string(i) + "]", "expected a real number");
        v(i) = j[size_t(i)].get<double>();
    }
    return v;
}

json dump_complex_matrix(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

json dump_real_matrix(const RealMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ComplexMatrix> parse_matrix_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of matrices");
    std::vector<ComplexMatrix> out;
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_complex_matrix(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

DocumentEnvelope parse_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    DocumentEnvelope doc;
    const json& ver = field(j, "$", "schema_version");
    if (!ver.is_string() || ver.get<std::string>() != "1")
        fail("$.schema_version", "expected the string \"1\"");
    doc.schema_version = "1";
    const json& kind = field(j, "$", "kind");
    if (!kind.is_string()) fail("$.kind", "expected a string");
    doc.kind = kind.get<std::string>();
    const json& payload = field(j, "$", "payload");
    const std::string pp = "$.payload";

    if (doc.kind == "state") {
        const json& dims = field(payload, pp, "dims");
        if (!dims.is_array() || dims.size() != 2 || !dims[0].is_number_integer() ||
            !dims[1].is_number_integer())
            fail(pp + ".dims", "expected [dA, dB]");
        Eigen::Index da = dims[0].get<long long>(), db = dims[1].get<long long>();
        if (da <= 0 || db <= 0) fail(pp + ".dims", "dimensions must be positive");
        ComplexMatrix m = parse_complex_matrix(field(payload, pp, "matrix"), pp + ".matrix");
        if (m.rows() != da * db || m.cols() != da * db)
            fail(pp + ".matrix", "matrix does not match dims");
        doc.state = BipartiteState{da, db, DensityOperator(m)};
    } else if (doc.kind == "channel") {
        Eigen::Index din = int_field(payload, pp, "d_in");
        Eigen::Index dout = int_field(payload, pp, "d_out");
        const json& repr = field(payload, pp, "repr");
        if (!repr.is_string()) fail(pp + ".repr", "expected \"choi\" or \"kraus\"");
        std::string rs = repr.get<std::string>();
        HermitianOperator choi{ComplexMatrix::Zero(1, 1)};
        if (rs == "choi") {
            ComplexMatrix m = parse_complex_matrix(field(payload, pp, "data"), pp + ".data");
            if (m.rows() != din * dout || m.cols() != din * dout)
                fail(pp + ".data", "Choi matrix does not match d_in*d_out");
            choi = HermitianOperator(m);
        } else if (rs == "kraus") {
            std::vector<ComplexMatrix> ks =
                parse_matrix_list(field(payload, pp, "data"), pp + ".data");
            for (size_t i = 0; i < ks.size(); ++i)
                if (ks[i].rows() != dout || ks[i].cols() != din)
                    fail(pp + ".data[" + std::to_string(i) + "]",
                         "Kraus operator must be d_out x d_in");
            choi = choi_from_kraus(ks).choi;
        } else {
            fail(pp + ".repr", "expected \"choi\" or \"kraus\"");
        }
        std::optional<CqStructure> cq;
        std::optional<CovariantStructure> cov;
        if (payload.contains("structure")) {
            const json& st = payload["structure"];
            const std::string sp = pp + ".structure";
            if (!st.is_object()) fail(sp, "expected an object");
            if (st.contains("cq")) {
                CqStructure c;
                for (auto& m :
                     parse_matrix_list(field(st["cq"], sp + ".cq", "states"), sp + ".cq.states"))
                    c.states.push_back(DensityOperator(m));
                cq = std::move(c);
            }
            if (st.contains("covariant")) {
                CovariantStructure c;
                c.group_in = parse_matrix_list(field(st["covariant"], sp + ".covariant", "group_in"),
                                               sp + ".covariant.group_in");
                c.group_out = parse_matrix_list(
                    field(st["covariant"], sp + ".covariant", "group_out"),
                    sp + ".covariant.group_out");
                cov = std::move(c);
            }
        }
        doc.channel = Channel(din, dout, choi, std::move(cq), std::move(cov));
    } else if (doc.kind == "cq_channel") {
        for (auto& m : parse_matrix_list(field(payload, pp, "states"), pp + ".states"))
            doc.cq_states.push_back(DensityOperator(m));
        Eigen::Index d = doc.cq_states.front().dim();
        for (const auto& s : doc.cq_states)
            if (s.dim() != d) fail(pp + ".states", "states must share a dimension");
    } else if (doc.kind == "gaussian") {
        Eigen::Index modes = int_field(payload, pp, "modes");
        RealVector mean = parse_real_vector(field(payload, pp, "mean"), pp + ".mean");
        if (mean.size() != 2 * modes) fail(pp + ".mean", "mean must have 2*modes entries");
        bool has_h = payload.contains("hamiltonian"), has_v = payload.contains("covariance");
        if (has_h == has_v)
            fail(pp, "provide exactly one of hamiltonian or covariance");
        if (has_h) {
            RealMatrix h = parse_real_matrix(payload["hamiltonian"], pp + ".hamiltonian");
            if (h.rows() != 2 * modes) fail(pp + ".hamiltonian", "size must be 2*modes");
            doc.gaussian = GaussianState(modes, mean, h);
        } else {
            RealMatrix v = parse_real_matrix(payload["covariance"], pp + ".covariance");
            if (v.rows() != 2 * modes) fail(pp + ".covariance", "size must be 2*modes");
            doc.gaussian = GaussianState::from_covariance(modes, mean, v);
        }
    } else {
        fail("$.kind", "unknown kind \"" + doc.kind + "\"");
    }
    return doc;
}

std::string serialize_document(const DocumentEnvelope& doc, bool pretty) {
    json j;
    j["schema_version"] = "1";
    j["kind"] = doc.kind;
    json payload;
    if (doc.kind == "state") {
        payload["dims"] = json::array({doc.state->d_a, doc.state->d_b});
        payload["matrix"] = dump_complex_matrix(doc.state->rho.matrix());
    } else if (doc.kind == "channel") {
        const Channel& ch = *doc.channel;
        payload["d_in"] = ch.d_in;
        payload["d_out"] = ch.d_out;
        payload["repr"] = "choi";
        payload["data"] = dump_complex_matrix(ch.choi.matrix());
        json st;
        if (ch.cq) {
            json states = json::array();
            for (const auto& s : ch.cq->states) states.push_back(dump_complex_matrix(s.matrix()));
            st["cq"]["states"] = std::move(states);
        }
        if (ch.covariant) {
            json gi = json::array(), go = json::array();
            for (const auto& u : ch.covariant->group_in) gi.push_back(dump_complex_matrix(u));
            for (const auto& u : ch.covariant->group_out) go.push_back(dump_complex_matrix(u));
            st["covariant"]["group_in"] = std::move(gi);
            st["covariant"]["group_out"] = std::move(go);
        }
        if (!st.is_null()) payload["structure"] = std::move(st);
    } else if (doc.kind == "cq_channel") {
        json states = json::array();
        for (const auto& s : doc.cq_states) states.push_back(dump_complex_matrix(s.matrix()));
        payload["states"] = std::move(states);
    } else if (doc.kind == "gaussian") {
        payload["modes"] = doc.gaussian->modes;
        json mean = json::array();
        for (Eigen::Index i = 0; i < doc.gaussian->mean.size(); ++i)
            mean.push_back(doc.gaussian->mean(i));
        payload["mean"] = std::move(mean);
        payload["hamiltonian"] = dump_real_matrix(doc.gaussian->hamiltonian);
    } else {
        throw InvariantError("serialize_document: unknown kind");
    }
    j["payload"] = std::move(payload);
    return pretty ? j.dump(2) : j.dump();
}

}  // namespace umlaut
