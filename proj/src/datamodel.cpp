#include "q2p/datamodel.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace q2p {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

Field parse_field(std::string_view name) {
    if (name == "brand") return Field::brand;
    if (name == "product_type") return Field::product_type;
    if (name == "activity") return Field::activity;
    if (name == "description") return Field::description;
    throw Error("unknown field name '" + std::string(name) + "'");
}

std::string_view field_name(Field field) {
    switch (field) {
        case Field::brand: return "brand";
        case Field::product_type: return "product_type";
        case Field::activity: return "activity";
        case Field::description: return "description";
    }
    return "?";
}

bool is_taxonomy_field(Field field) noexcept { return field != Field::description; }

std::optional<std::string> Product::value(Field field) const {
    switch (field) {
        case Field::brand: return brand;
        case Field::product_type: return product_type;
        case Field::activity: return activity;
        case Field::description: return description;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> clean_label(const std::optional<std::string>& raw) {
    if (!raw) return std::nullopt;
    std::string n = normalize_label(*raw);
    if (n.empty()) return std::nullopt;
    return n;
}

}  // namespace

Catalog::Catalog(std::vector<Product> products) {
    products_.reserve(products.size());
    for (auto& p : products) add(std::move(p));
}

void Catalog::add(Product product) {
    if (product.product_id.empty()) throw Error("product_id must be non-empty");
    if (by_id_.count(product.product_id)) {
        throw Error("duplicate product_id '" + product.product_id + "'");
    }
    product.brand = clean_label(product.brand);
    product.product_type = clean_label(product.product_type);
    product.activity = clean_label(product.activity);
    by_id_.emplace(product.product_id, products_.size());
    products_.push_back(std::move(product));
}

const Product* Catalog::find(std::string_view product_id) const {
    auto it = by_id_.find(std::string(product_id));
    return it == by_id_.end() ? nullptr : &products_[it->second];
}

std::vector<Field> Catalog::taxonomy_fields() const {
    std::vector<Field> out;
    for (Field f : {Field::brand, Field::product_type, Field::activity}) {
        for (const auto& p : products_) {
            if (p.value(f)) {
                out.push_back(f);
                break;
            }
        }
    }
    return out;
}

std::string_view source_name(ClickSource source) {
    return source == ClickSource::real ? "real" : "synthetic";
}

bool ClickLog::add(std::string_view query, std::string product_id) {
    std::string q = normalize_query(query);
    if (q.empty()) return false;
    events_.push_back({std::move(q), std::move(product_id)});
    return true;
}

// ---------------------------------------------------------------------------

IngestionReport::Section& IngestionReport::section(std::string_view name) {
    for (auto& s : sections) {
        if (s.name == name) return s;
    }
    sections.push_back(Section{std::string(name), 0, 0, 0, {}});
    return sections.back();
}

std::string IngestionReport::to_text() const {
    std::ostringstream out;
    for (const auto& s : sections) {
        out << "[" << s.name << "]\n";
        out << "loaded: " << s.loaded << "\n";
        out << "dropped: " << s.dropped << "\n";
        out << "unknown: " << s.unknown << "\n";
        for (const auto& w : s.warnings) out << "warning: " << w << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------

namespace {

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

/// Calls `fn(object, line_no)` for each non-blank line, which must hold a
/// JSON object.
template <typename Fn>
void read_jsonl(std::istream& in, const std::string& name, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(name, line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(name, line_no, "expected a JSON object");
        fn(obj, line_no);
    }
}

std::string required_string(const json& obj, const char* key, const std::string& name,
                            std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw ParseError(name, line_no, std::string("missing or non-string '") + key + "'");
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key,
                                           const std::string& name, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
        throw ParseError(name, line_no, std::string("'") + key + "' must be a string or null");
    }
    return it->get<std::string>();
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return in;
}

}  // namespace

Catalog parse_catalog(std::istream& in, const std::string& name, IngestionReport* report) {
    Catalog catalog;
    read_jsonl(in, name, [&](const json& obj, std::size_t line_no) {
        Product p;
        p.product_id = required_string(obj, "product_id", name, line_no);
        if (p.product_id.empty()) throw ParseError(name, line_no, "empty product_id");
        p.brand = optional_string(obj, "brand", name, line_no);
        p.product_type = optional_string(obj, "product_type", name, line_no);
        p.activity = optional_string(obj, "activity", name, line_no);
        p.description = optional_string(obj, "description", name, line_no).value_or("");
        if (catalog.contains(p.product_id)) {
            throw ParseError(name, line_no, "duplicate product_id '" + p.product_id + "'");
        }
        catalog.add(std::move(p));
    });
    if (report) {
        auto& s = report->section("catalog");
        s.loaded = catalog.size();
        if (catalog.empty()) s.warnings.push_back("catalog is empty");
    }
    return catalog;
}

Catalog load_catalog(const std::string& path, IngestionReport* report) {
    auto in = open_input(path);
    return parse_catalog(in, path, report);
}

SessionSet parse_sessions(std::istream& in, const std::string& name, const Catalog* catalog,
                          IngestionReport* report) {
    SessionSet sessions;
    std::size_t dropped = 0, unknown = 0;
    read_jsonl(in, name, [&](const json& obj, std::size_t line_no) {
        Session s;
        s.session_id = required_string(obj, "session_id", name, line_no);
        auto it = obj.find("events");
        if (it == obj.end() || !it->is_array()) {
            throw ParseError(name, line_no, "missing or non-array 'events'");
        }
        for (const auto& ev : *it) {
            if (!ev.is_string() || ev.get_ref<const std::string&>().empty()) {
                throw ParseError(name, line_no, "events must be non-empty strings");
            }
            s.events.push_back(ev.get<std::string>());
        }
        if (s.events.size() < 2) {
            ++dropped;
            return;
        }
        if (catalog) {
            for (const auto& id : s.events) {
                if (!catalog->contains(id)) ++unknown;
            }
        }
        sessions.push_back(std::move(s));
    });
    if (report) {
        auto& sec = report->section("sessions");
        sec.loaded = sessions.size();
        sec.dropped = dropped;
        sec.unknown = unknown;
        if (sessions.empty()) sec.warnings.push_back("no usable sessions");
    }
    return sessions;
}

SessionSet load_sessions(const std::string& path, const Catalog* catalog,
                         IngestionReport* report) {
    auto in = open_input(path);
    return parse_sessions(in, path, catalog, report);
}

ClickLog parse_click_log(std::istream& in, const std::string& name, ClickSource source,
                         IngestionReport* report) {
    ClickLog log(source);
    std::size_t dropped = 0;
    read_jsonl(in, name, [&](const json& obj, std::size_t line_no) {
        std::string query = required_string(obj, "query", name, line_no);
        std::string pid = required_string(obj, "product_id", name, line_no);
        if (pid.empty()) throw ParseError(name, line_no, "empty product_id");
        if (!log.add(query, std::move(pid))) ++dropped;
    });
    if (report) {
        auto& sec = report->section(std::string("clicks/") + std::string(source_name(source)));
        sec.loaded = log.size();
        sec.dropped = dropped;
        if (log.empty()) sec.warnings.push_back("click log is empty");
    }
    return log;
}

ClickLog load_click_log(const std::string& path, ClickSource source, IngestionReport* report) {
    auto in = open_input(path);
    return parse_click_log(in, path, source, report);
}

// ---------------------------------------------------------------------------

namespace {

ordered_json nullable(const std::optional<std::string>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

void write_catalog(std::ostream& out, const Catalog& catalog) {
    for (const auto& p : catalog.products()) {
        ordered_json obj;
        obj["product_id"] = p.product_id;
        obj["brand"] = nullable(p.brand);
        obj["product_type"] = nullable(p.product_type);
        obj["activity"] = nullable(p.activity);
        obj["description"] = p.description;
        out << obj.dump() << '\n';
    }
}

void write_sessions(std::ostream& out, const SessionSet& sessions) {
    for (const auto& s : sessions) {
        ordered_json obj;
        obj["session_id"] = s.session_id;
        obj["events"] = s.events;
        out << obj.dump() << '\n';
    }
}

void write_click_log(std::ostream& out, const ClickLog& log) {
    for (const auto& e : log.events()) {
        ordered_json obj;
        obj["query"] = e.query;
        obj["product_id"] = e.product_id;
        out << obj.dump() << '\n';
    }
}

}  // namespace q2p
