#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dmnbot/engine.hpp"

namespace dmnbot {

// Finite value set an input ranges over during necessity and overlap
// analysis. Numeric columns are represented by probe points: every
// constraint boundary, each boundary +/-1 and the midpoint of every interval.
struct Domain {
    enum class Kind { Enumerated, NumericProbe };

    Kind kind = Kind::Enumerated;
    std::vector<Value> values;

    // Numeric boundaries mentioned by the tests, ascending (NumericProbe only).
    std::vector<double> boundaries;

    bool contains(const Value& v) const;
    int index_of(const Value& v) const;  // -1 when absent
};

// Domain of a single column, from that column's tests only.
Domain column_domain(const DecisionTable& table, std::size_t column);

// Domain of a user input across every table column and literal expression
// that reads it. Throws EmptyDomain for a string input that only ever meets
// wildcards, UnknownInput when no such input exists.
Domain domain_of(const DmnModel& model, std::string_view input);

// User inputs reachable from `element`, expanded depth-first in column order
// with each supplied column replaced by its supplier's inputs; no duplicates.
std::vector<std::string> required_inputs(const DmnModel& model, std::string_view element);

struct Overlap {
    int rule_a = 0;
    int rule_b = 0;
    Assignment witness;  // keyed by column normalized name
};

// Rule pairs (a < b) that both accept some point of the column domains.
// `domains` is indexed by column.
std::vector<Overlap> detect_overlaps(const DecisionTable& table, const std::vector<Domain>& domains);

struct DecisionOverlap {
    std::string decision;
    Overlap overlap;
};

// detect_overlaps over every table, with user columns ranging over domain_of
// and supplied columns over their own column domain.
std::vector<DecisionOverlap> detect_model_overlaps(const DmnModel& model);

// Necessity queries over one model with shared caches. Safe for concurrent
// use; the model must outlive the engine.
class RelevanceEngine {
public:
    explicit RelevanceEngine(const DmnModel& model);
    ~RelevanceEngine();
    RelevanceEngine(const RelevanceEngine&) = delete;
    RelevanceEngine& operator=(const RelevanceEngine&) = delete;

    const DmnModel& model() const { return model_; }
    const Domain& domain(std::string_view input) const;
    const std::vector<std::string>& required(std::string_view decision) const;

    // True iff two completions of `partial` over the probe domains that differ
    // only in `input` give different results or a different error status.
    // Bindings in `partial` for derived names are pinned (see evaluate_drd).
    bool is_necessary(std::string_view decision, std::string_view input, const Assignment& partial) const;

    // `partial` with every unbound required input set to its first domain
    // value. Used once no unbound input is necessary.
    Assignment complete(std::string_view decision, const Assignment& partial) const;

private:
    struct Table;
    struct Outcome;

    Table& table_for(const std::string& decision) const;
    std::string outcome_of(const std::string& decision, const Assignment& complete) const;
    bool slow_query(const std::string& decision, const std::string& input, const Assignment& partial) const;

    const DmnModel& model_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, Domain> domains_;
    mutable std::map<std::string, std::vector<std::string>> required_;
    mutable std::map<std::string, std::unique_ptr<Table>> tables_;
    mutable std::map<std::string, std::string> outcomes_;
    mutable std::map<std::string, bool> memo_;
};

// One-shot convenience wrapper.
bool is_necessary(const DmnModel& model, std::string_view decision, std::string_view input,
                  const Assignment& partial);

}  // namespace dmnbot
