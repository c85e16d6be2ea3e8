#include "pfchan/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pfchan {

namespace {

std::complex<double> entry_from_json(const Json& e, const std::string& field) {
    if (e.is_number()) return {e.get<double>(), 0.0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return {e[0].get<double>(), e[1].get<double>()};
    throw ParseError("field '" + field + "': matrix entry must be a number or [re, im]");
}

CVec vector_from_json(const Json& j, const std::string& field) {
    if (!j.is_array()) throw ParseError("field '" + field + "': expected an array");
    CVec v(static_cast<Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i)
        v[static_cast<Index>(i)] = entry_from_json(j[i], field);
    return v;
}

Json vector_to_json(const CVec& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i)
        out.push_back(Json::array({v[i].real(), v[i].imag()}));
    return out;
}

const Json& require(const Json& j, const std::string& key) {
    if (!j.contains(key)) throw ParseError("missing field '" + key + "'");
    return j.at(key);
}

} // namespace

Json complex_matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c)
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat complex_matrix_from_json(const Json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw ParseError("field '" + field + "': expected a nonempty array of rows");
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j[0].size());
    Mat m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw ParseError("field '" + field + "': ragged rows");
        for (Index c = 0; c < cols; ++c)
            m(r, c) = entry_from_json(row[static_cast<size_t>(c)], field);
    }
    return m;
}

Json real_matrix_to_json(const RMat& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json channel_to_json(const Channel& ch) {
    Json j;
    j["n"] = ch.dim();
    Json kraus = Json::array();
    for (const Mat& k : ch.kraus()) kraus.push_back(complex_matrix_to_json(k));
    j["kraus"] = std::move(kraus);
    return j;
}

Channel channel_from_json(const Json& j, const Tolerance& tol, bool require_trace_preserving) {
    if (!j.is_object()) throw ParseError("channel: expected a JSON object");
    const Index n = require(j, "n").get<Index>();
    if (n <= 0) throw ParseError("field 'n': must be a positive integer");
    if (j.contains("kraus")) {
        const Json& arr = j.at("kraus");
        if (!arr.is_array() || arr.empty())
            throw ParseError("field 'kraus': expected a nonempty array of matrices");
        std::vector<Mat> kraus;
        for (const Json& km : arr) {
            Mat k = complex_matrix_from_json(km, "kraus");
            if (k.rows() != n || k.cols() != n)
                throw ParseError("field 'kraus': operators must be " + std::to_string(n) + "x" +
                                 std::to_string(n));
            kraus.push_back(std::move(k));
        }
        return Channel::from_kraus(std::move(kraus), tol, require_trace_preserving);
    }
    if (j.contains("choi")) {
        Mat choi = complex_matrix_from_json(j.at("choi"), "choi");
        if (choi.rows() != n * n || choi.cols() != n * n)
            throw ParseError("field 'choi': expected " + std::to_string(n * n) + "x" +
                             std::to_string(n * n));
        return Channel::from_choi(choi, n, tol, require_trace_preserving);
    }
    throw ParseError("channel: needs a 'kraus' or 'choi' field");
}

Json witness_to_json(const PFWitness& w) {
    Json j;
    j["kind"] = w.kind();
    j["n"] = w.n;
    j["m"] = w.m();
    Json weights = Json::array();
    for (Index s = 0; s < w.block_weights.size(); ++s) weights.push_back(w.block_weights[s]);
    j["weights"] = std::move(weights);
    Json blocks = Json::array();
    for (Index b : w.block_dims) blocks.push_back(b);
    j["blocks"] = std::move(blocks);
    Json ops = Json::array();
    for (const Mat& a : w.ops) ops.push_back(complex_matrix_to_json(a));
    j["ops"] = std::move(ops);
    Json kraus = Json::array();
    for (const Mat& k : w.kraus) kraus.push_back(complex_matrix_to_json(k));
    j["kraus"] = std::move(kraus);
    return j;
}

PFWitness witness_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("witness: expected a JSON object");
    PFWitness w;
    w.n = require(j, "n").get<Index>();
    const std::string kind = require(j, "kind").get<std::string>();
    const Index m = require(j, "m").get<Index>();

    std::vector<double> weights;
    for (const Json& e : require(j, "weights")) weights.push_back(e.get<double>());

    if (j.contains("blocks")) {
        for (const Json& e : j.at("blocks")) w.block_dims.push_back(e.get<Index>());
    } else if (kind == "abelian") {
        w.block_dims.assign(weights.size(), 1);
    } else if (kind == "block") {
        w.block_dims.assign(1, m);
        if (weights.empty()) weights.push_back(1.0);
    } else {
        throw ParseError("witness: kind '" + kind + "' requires a 'blocks' field");
    }
    if (w.block_dims.size() != weights.size())
        throw ParseError("witness: 'weights' and 'blocks' lengths differ");
    w.block_weights = Eigen::Map<RVec>(weights.data(), static_cast<Index>(weights.size()));
    if (w.m() != m)
        throw ParseError("witness: block dimensions sum to " + std::to_string(w.m()) +
                         " but 'm' is " + std::to_string(m));

    for (const Json& a : require(j, "ops")) {
        Mat op = complex_matrix_from_json(a, "ops");
        if (op.rows() != m || op.cols() != m)
            throw ParseError("field 'ops': operators must be " + std::to_string(m) + "x" +
                             std::to_string(m));
        w.ops.push_back(std::move(op));
    }
    if (j.contains("kraus"))
        for (const Json& k : j.at("kraus"))
            w.kraus.push_back(complex_matrix_from_json(k, "kraus"));
    return w;
}

Json cone_to_json(const PolyhedralCone& c) {
    Json j;
    j["dim"] = c.dim();
    Json gens = Json::array();
    for (const RVec& g : c.generators()) {
        Json row = Json::array();
        for (Index i = 0; i < g.size(); ++i) row.push_back(g[i]);
        gens.push_back(std::move(row));
    }
    j["generators"] = std::move(gens);
    return j;
}

PolyhedralCone cone_from_json(const Json& j, const Tolerance& tol) {
    if (!j.is_object()) throw ParseError("cone: expected a JSON object");
    const Index dim = require(j, "dim").get<Index>();
    std::vector<RVec> gens;
    for (const Json& g : require(j, "generators")) {
        CVec v = vector_from_json(g, "generators");
        gens.push_back(v.real());
    }
    return PolyhedralCone(dim, std::move(gens), tol);
}

Json upb_to_json(const UPBCandidate& u) {
    Json j;
    j["d1"] = u.d1;
    j["d2"] = u.d2;
    Json us = Json::array(), vs = Json::array();
    for (const CVec& x : u.us) us.push_back(vector_to_json(x));
    for (const CVec& x : u.vs) vs.push_back(vector_to_json(x));
    j["us"] = std::move(us);
    j["vs"] = std::move(vs);
    return j;
}

UPBCandidate upb_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("upb: expected a JSON object");
    UPBCandidate u;
    u.d1 = require(j, "d1").get<Index>();
    u.d2 = require(j, "d2").get<Index>();
    for (const Json& x : require(j, "us")) u.us.push_back(vector_from_json(x, "us"));
    for (const Json& x : require(j, "vs")) u.vs.push_back(vector_from_json(x, "vs"));
    return u;
}

RMat real_matrix_from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                size_t pos = 0;
                double v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
                    ++pos;
                if (pos != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ParseError("csv: cannot parse cell '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("csv: no data");
    RMat m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return m;
}

std::string real_matrix_to_csv(const RMat& m) {
    std::string out;
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(r, c));
        }
        out += '\n';
    }
    return out;
}

std::string format_double(double x) {
    if (!std::isfinite(x)) throw InvariantViolation("format_double: non-finite value");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

void dump_rec(const Json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<size_t>(indent * depth), ' ');
    const std::string pad_in(static_cast<size_t>(indent * (depth + 1)), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) { out += "{}"; return; }
        out += "{\n";
        size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            out += pad_in + Json(it.key()).dump() + ": ";
            dump_rec(it.value(), out, indent, depth + 1);
            if (i + 1 < j.size()) out += ',';
            out += '\n';
        }
        out += pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) { out += "[]"; return; }
        // Short numeric arrays stay on one line to keep matrices readable.
        bool scalars_only = true;
        for (const Json& e : j)
            if (e.is_structured()) { scalars_only = false; break; }
        if (scalars_only) {
            out += '[';
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                dump_rec(j[i], out, indent, depth);
            }
            out += ']';
            return;
        }
        out += "[\n";
        for (size_t i = 0; i < j.size(); ++i) {
            out += pad_in;
            dump_rec(j[i], out, indent, depth + 1);
            if (i + 1 < j.size()) out += ',';
            out += '\n';
        }
        out += pad + "]";
        return;
    }
    case Json::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

} // namespace

std::string dump_json(const Json& j, int indent) {
    std::string out;
    dump_rec(j, out, indent, 0);
    out += '\n';
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file '" + path + "'");
    out << text;
}

Json load_json_file(const std::string& path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("file '" + path + "': " + e.what());
    }
}

} // namespace pfchan
