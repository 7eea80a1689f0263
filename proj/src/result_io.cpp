#include "ospca/result_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ospca/matrix_io.hpp"

namespace ospca {

namespace {

// Minimal JSON emitter so floats can be printed with 17 significant digits.
struct JsonWriter {
    std::ostream& os;
    int indent = 0;
    bool need_comma = false;

    void newline() {
        os << '\n';
        for (int i = 0; i < indent; ++i) os << "  ";
    }
    void sep() {
        if (need_comma) os << ',';
        newline();
        need_comma = false;
    }
    void open_object(const std::string& key = "") {
        sep();
        if (!key.empty()) os << '"' << key << "\": ";
        os << '{';
        ++indent;
        need_comma = false;
    }
    void close_object() {
        --indent;
        newline();
        os << '}';
        need_comma = true;
    }
    void open_array(const std::string& key) {
        sep();
        os << '"' << key << "\": [";
        ++indent;
        need_comma = false;
    }
    void close_array() {
        --indent;
        newline();
        os << ']';
        need_comma = true;
    }
    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out += buf;
                    } else {
                        out += c;
                    }
            }
        }
        return out;
    }
    void field(const std::string& key, const std::string& v) {
        sep();
        os << '"' << key << "\": \"" << escape(v) << '"';
        need_comma = true;
    }
    void field(const std::string& key, double v) {
        sep();
        os << '"' << key << "\": " << format_double(v);
        need_comma = true;
    }
    void field(const std::string& key, std::int64_t v) {
        sep();
        os << '"' << key << "\": " << v;
        need_comma = true;
    }
    void field(const std::string& key, std::uint64_t v) {
        sep();
        os << '"' << key << "\": " << v;
        need_comma = true;
    }
    void field(const std::string& key, int v) { field(key, static_cast<std::int64_t>(v)); }
    void field(const std::string& key, bool v) {
        sep();
        os << '"' << key << "\": " << (v ? "true" : "false");
        need_comma = true;
    }
    void int_array(const std::string& key, const std::vector<int>& vals) {
        sep();
        os << '"' << key << "\": [";
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i > 0) os << ',';
            os << vals[i];
        }
        os << ']';
        need_comma = true;
    }
    void double_array(const std::string& key, const std::vector<double>& vals) {
        sep();
        os << '"' << key << "\": [";
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i > 0) os << ',';
            os << format_double(vals[i]);
        }
        os << ']';
        need_comma = true;
    }
};

void write_report(JsonWriter& w, const std::string& key, const CertificateReport& rep) {
    w.open_object(key);
    w.field("aggregate_pass", rep.aggregate_pass());
    if (rep.oracle_cap_exceeded) w.field("oracle_cap_exceeded", true);
    w.open_array("checks");
    for (const auto& c : rep.checks) {
        w.open_object();
        w.field("name", c.name);
        w.field("pass", c.pass);
        w.field("measured", c.measured);
        w.field("tolerance", c.tolerance);
        w.close_object();
    }
    w.close_array();
    w.open_array("info");
    for (const auto& i : rep.info) {
        w.open_object();
        w.field("name", i.name);
        w.field("value", i.value);
        w.close_object();
    }
    w.close_array();
    w.close_object();
}

}  // namespace

std::string fingerprint_hex(std::uint64_t fp) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fp));
    return buf;
}

bool ResultDocument::aggregate_pass() const {
    if (!solution_report.aggregate_pass()) return false;
    if (has_eps_report && !eps_report.aggregate_pass()) return false;
    return true;
}

void write_result_json(std::ostream& os, const ResultDocument& doc) {
    JsonWriter w{os};
    os << '{';
    ++w.indent;

    w.open_object("config");
    w.field("mode", doc.mode);
    w.field("matrix_path", doc.matrix_path);
    w.field("p", doc.p);
    w.field("k", doc.k);
    w.field("eps", doc.eps);
    w.field("delta", doc.delta);
    w.field("oracle_cap", doc.oracle_cap);
    w.field("seed", doc.seed);
    w.close_object();

    w.open_object("matrix");
    w.field("n", doc.n);
    w.field("trace", doc.trace);
    w.field("fingerprint", doc.fingerprint);
    w.close_object();

    w.open_array("components");
    double cumulative = 0.0;
    for (std::size_t i = 0; i < doc.solution.components.size(); ++i) {
        const auto& c = doc.solution.components[i];
        cumulative += c.variance;
        w.open_object();
        w.field("k", static_cast<int>(i + 1));
        w.int_array("support", c.support.indices);
        w.double_array("values", c.values);
        w.field("variance", c.variance);
        w.field("cumulative_variance", cumulative);
        w.field("sparsity_relaxed", c.sparsity_relaxed);
        w.close_object();
    }
    w.close_array();
    w.field("total_variance", doc.solution.total_variance());

    w.open_object("certificates");
    w.field("eps_level", doc.eps_level);
    w.field("slack", doc.slack);
    write_report(w, "solution", doc.solution_report);
    if (doc.has_eps_report) write_report(w, "eps", doc.eps_report);
    w.field("aggregate_pass", doc.aggregate_pass());
    w.close_object();

    if (!doc.bnb_steps.empty()) {
        w.open_array("bnb");
        for (const auto& s : doc.bnb_steps) {
            w.open_object();
            w.field("k", s.k);
            w.field("lower_bound", s.lower_bound);
            w.field("upper_bound", s.upper_bound);
            w.field("eps", s.eps);
            w.field("nodes_explored", s.nodes_explored);
            w.field("nodes_pruned", s.nodes_pruned);
            w.field("relaxed", s.relaxed);
            w.close_object();
        }
        w.close_array();
    }

    if (doc.has_blocks) {
        w.open_object("blocks");
        w.field("delta", doc.blocks.delta);
        w.field("d", doc.blocks.d);
        w.int_array("sizes", doc.blocks.sizes);
        w.open_array("components");
        for (const auto& comp : doc.blocks.components) {
            w.sep();
            os << '[';
            for (std::size_t i = 0; i < comp.size(); ++i) {
                if (i > 0) os << ',';
                os << comp[i];
            }
            os << ']';
            w.need_comma = true;
        }
        w.close_array();
        w.field("predicted_cost_full", doc.blocks.cost_full);
        w.field("predicted_cost_decomposed", doc.blocks.cost_decomposed);
        w.field("supports_evaluated", doc.blocks.supports_evaluated);
        w.close_object();
    }

    if (!doc.warnings.empty()) {
        w.open_array("warnings");
        for (const auto& msg : doc.warnings) {
            w.sep();
            os << '"' << JsonWriter::escape(msg) << '"';
            w.need_comma = true;
        }
        w.close_array();
    }

    --w.indent;
    os << '\n' << "}" << '\n';
}

void write_result_csv(std::ostream& os, const ResultDocument& doc) {
    os << "k,variance,sparsity_relaxed,support,values\n";
    for (std::size_t i = 0; i < doc.solution.components.size(); ++i) {
        const auto& c = doc.solution.components[i];
        os << (i + 1) << ',' << format_double(c.variance) << ','
           << (c.sparsity_relaxed ? 1 : 0) << ',';
        for (std::size_t t = 0; t < c.support.indices.size(); ++t) {
            if (t > 0) os << ';';
            os << c.support.indices[t];
        }
        os << ',';
        for (std::size_t t = 0; t < c.values.size(); ++t) {
            if (t > 0) os << ';';
            os << format_double(c.values[t]);
        }
        os << '\n';
    }
}

ResultDocument read_result_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open result file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);

    ResultDocument doc;
    const auto& cfg = j.at("config");
    doc.mode = cfg.value("mode", "exact");
    doc.matrix_path = cfg.value("matrix_path", "");
    doc.p = cfg.value("p", 0);
    doc.k = cfg.value("k", 0);
    doc.eps = cfg.value("eps", 0.0);
    doc.delta = cfg.value("delta", 0.0);
    doc.oracle_cap = cfg.value("oracle_cap", 12);
    doc.seed = cfg.value("seed", static_cast<std::uint64_t>(0));

    const auto& m = j.at("matrix");
    doc.n = m.at("n").get<int>();
    doc.trace = m.at("trace").get<double>();
    doc.fingerprint = m.value("fingerprint", "");

    doc.solution.n = doc.n;
    doc.solution.p = doc.p;
    doc.solution.mode = doc.mode;
    for (const auto& jc : j.at("components")) {
        SparseComponent c;
        std::vector<int> idx = jc.at("support").get<std::vector<int>>();
        c.support = IndexSet(std::move(idx), doc.n);
        c.values = jc.at("values").get<std::vector<double>>();
        c.variance = jc.at("variance").get<double>();
        c.sparsity_relaxed = jc.value("sparsity_relaxed", false);
        doc.solution.components.push_back(std::move(c));
    }
    if (doc.mode == "threshold")
        doc.solution.eps = 2.0 * doc.p * doc.delta + doc.eps;
    else if (doc.mode == "bnb")
        doc.solution.eps = doc.eps;

    if (j.contains("certificates")) {
        doc.eps_level = j["certificates"].value("eps_level", "none");
        doc.slack = j["certificates"].value("slack", 0.0);
    }
    return doc;
}

}  // namespace ospca
