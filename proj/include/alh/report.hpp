#pragma once

// Deterministic result reporting. The report file is byte-reproducible for a
// fixed build: insertion-ordered rows, every double printed with %.17g, no
// timestamps. Wall-clock timings go to a separate file so the reproducible
// artifact never mixes with volatile data.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "alh/grid.hpp"

namespace alh {

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

class Report {
  public:
    static constexpr const char* kHeader = "# alh-compactify report v1";

    void add(const std::string& section, const std::string& key, double value) {
        rows_.push_back({section, key, fmt_g17(value), Kind::number});
    }
    void add_int(const std::string& section, const std::string& key, long long value) {
        rows_.push_back({section, key, std::to_string(value), Kind::number});
    }
    void add_flag(const std::string& section, const std::string& key, bool value) {
        rows_.push_back({section, key, value ? "true" : "false", Kind::flag});
    }
    void add_text(const std::string& section, const std::string& key, const std::string& value) {
        rows_.push_back({section, key, value, Kind::text});
    }

    void write_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw data_error("cannot open report file for writing: " + path);
        out << kHeader << "\n";
        out << "section,key,value\n";
        for (const Row& r : rows_) out << r.section << "," << r.key << "," << csv_cell(r.value) << "\n";
        if (!out) throw data_error("failed writing report file: " + path);
    }

    void write_json(const std::string& path) const {
        nlohmann::ordered_json doc;
        doc["report"] = "alh-compactify report v1";
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const Row& r : rows_) {
            nlohmann::ordered_json obj;
            obj["section"] = r.section;
            obj["key"] = r.key;
            switch (r.kind) {
                case Kind::number: obj["value"] = r.value; break;  // exact %.17g text
                case Kind::flag: obj["value"] = (r.value == "true"); break;
                case Kind::text: obj["value"] = r.value; break;
            }
            rows.push_back(std::move(obj));
        }
        doc["rows"] = std::move(rows);
        std::ofstream out(path);
        if (!out) throw data_error("cannot open report file for writing: " + path);
        out << doc.dump(2) << "\n";
        if (!out) throw data_error("failed writing report file: " + path);
    }

    std::size_t size() const { return rows_.size(); }

    // Last value recorded under (section, key); empty string when absent.
    std::string lookup(const std::string& section, const std::string& key) const {
        for (auto it = rows_.rbegin(); it != rows_.rend(); ++it)
            if (it->section == section && it->key == key) return it->value;
        return {};
    }

  private:
    enum class Kind { number, flag, text };
    struct Row {
        std::string section, key, value;
        Kind kind;
    };

    static std::string csv_cell(const std::string& v) {
        if (v.find_first_of(",\"\n") == std::string::npos) return v;
        std::string out = "\"";
        for (char c : v) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
        return out;
    }

    std::vector<Row> rows_;
};

class Timer {
  public:
    Timer() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

  private:
    std::chrono::steady_clock::time_point t0_;
};

class Timings {
  public:
    void add(const std::string& label, double seconds) { rows_.emplace_back(label, seconds); }

    void write_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw data_error("cannot open timings file for writing: " + path);
        out << "label,seconds\n";
        for (const auto& [label, sec] : rows_) out << label << "," << fmt_g17(sec) << "\n";
    }

  private:
    std::vector<std::pair<std::string, double>> rows_;
};

} // namespace alh
