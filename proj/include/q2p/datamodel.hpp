#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "q2p/common.hpp"

namespace q2p {

/// Catalog attributes that can be indexed or used as taxonomy types.
enum class Field { brand, product_type, activity, description };

/// Parses "brand" / "product_type" / "activity" / "description".
Field parse_field(std::string_view name);
std::string_view field_name(Field field);
bool is_taxonomy_field(Field field) noexcept;

struct Product {
    std::string product_id;
    std::optional<std::string> brand;
    std::optional<std::string> product_type;
    std::optional<std::string> activity;
    std::string description;

    /// Label for a taxonomy field, or the description for Field::description.
    std::optional<std::string> value(Field field) const;

    bool operator==(const Product&) const = default;
};

/// Products with unique ids. Labels are normalized on insertion.
class Catalog {
public:
    Catalog() = default;
    explicit Catalog(std::vector<Product> products);

    /// Normalizes labels and appends. Throws on empty or duplicate id.
    void add(Product product);

    const std::vector<Product>& products() const noexcept { return products_; }
    std::size_t size() const noexcept { return products_.size(); }
    bool empty() const noexcept { return products_.empty(); }

    const Product* find(std::string_view product_id) const;
    bool contains(std::string_view product_id) const { return find(product_id) != nullptr; }

    /// Taxonomy fields with at least one labeled product, in canonical order
    /// (brand, product_type, activity).
    std::vector<Field> taxonomy_fields() const;

    bool operator==(const Catalog& other) const { return products_ == other.products_; }

private:
    std::vector<Product> products_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

struct Session {
    std::string session_id;
    std::vector<std::string> events;

    bool operator==(const Session&) const = default;
};

using SessionSet = std::vector<Session>;

struct ClickEvent {
    std::string query;
    std::string product_id;

    bool operator==(const ClickEvent&) const = default;
};

enum class ClickSource { real, synthetic };
std::string_view source_name(ClickSource source);

class ClickLog {
public:
    explicit ClickLog(ClickSource source) : source_(source) {}
    ClickLog(ClickSource source, std::vector<ClickEvent> events)
        : source_(source), events_(std::move(events)) {}

    ClickSource source() const noexcept { return source_; }
    const std::vector<ClickEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }

    /// Normalizes the query; returns false (and stores nothing) if it is
    /// empty after normalization.
    bool add(std::string_view query, std::string product_id);

    bool operator==(const ClickLog&) const = default;

private:
    ClickSource source_;
    std::vector<ClickEvent> events_;
};

/// Counts gathered while reading input files.
struct IngestionReport {
    struct Section {
        std::string name;
        std::size_t loaded = 0;
        std::size_t dropped = 0;
        std::size_t unknown = 0;
        std::vector<std::string> warnings;
    };
    std::vector<Section> sections;

    Section& section(std::string_view name);
    std::string to_text() const;
};

// ---------------------------------------------------------------------------
// JSON-lines ingestion. Every loader reports malformed lines with their
// 1-based line number via ParseError.

Catalog load_catalog(const std::string& path, IngestionReport* report = nullptr);
Catalog parse_catalog(std::istream& in, const std::string& name,
                      IngestionReport* report = nullptr);

/// Sessions shorter than two events are dropped. When `catalog` is given,
/// events naming unknown products are kept and counted.
SessionSet load_sessions(const std::string& path, const Catalog* catalog = nullptr,
                         IngestionReport* report = nullptr);
SessionSet parse_sessions(std::istream& in, const std::string& name,
                          const Catalog* catalog = nullptr, IngestionReport* report = nullptr);

ClickLog load_click_log(const std::string& path, ClickSource source,
                        IngestionReport* report = nullptr);
ClickLog parse_click_log(std::istream& in, const std::string& name, ClickSource source,
                         IngestionReport* report = nullptr);

void write_catalog(std::ostream& out, const Catalog& catalog);
void write_sessions(std::ostream& out, const SessionSet& sessions);
void write_click_log(std::ostream& out, const ClickLog& log);

}  // namespace q2p
