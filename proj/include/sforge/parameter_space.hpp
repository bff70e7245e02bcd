#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sforge/rule_expr.hpp"
#include "sforge/vocabulary.hpp"

namespace sforge {

// Define rules must reproduce their stored target value within this relative
// tolerance; pure double arithmetic needs no more slack.
inline constexpr double kDefineTolerance = 1e-9;

enum class UnitTag { meter, meter_per_second, meter_per_second2, second, radian, unitless };

inline std::string_view to_string(UnitTag u) {
    switch (u) {
        case UnitTag::meter: return "m";
        case UnitTag::meter_per_second: return "m/s";
        case UnitTag::meter_per_second2: return "m/s2";
        case UnitTag::second: return "s";
        case UnitTag::radian: return "rad";
        case UnitTag::unitless: return "1";
    }
    return "";
}

inline std::optional<UnitTag> unit_from_string(std::string_view s) {
    for (UnitTag u : {UnitTag::meter, UnitTag::meter_per_second, UnitTag::meter_per_second2,
                      UnitTag::second, UnitTag::radian, UnitTag::unitless}) {
        if (to_string(u) == s) return u;
    }
    return std::nullopt;
}

// Closed interval or finite value set.
using Domain = std::variant<Interval, std::vector<double>>;

inline bool domain_contains(const Domain& d, double v) {
    if (const auto* iv = std::get_if<Interval>(&d)) return iv->contains(v);
    const auto& set = std::get<std::vector<double>>(d);
    for (double e : set) {
        if (e == v || std::abs(e - v) <= 1e-12 * std::max(1.0, std::abs(e))) return true;
    }
    return false;
}

// Enclosing interval of a domain, for interval arithmetic over rule scopes.
inline Interval domain_hull(const Domain& d) {
    if (const auto* iv = std::get_if<Interval>(&d)) return *iv;
    const auto& set = std::get<std::vector<double>>(d);
    Interval hull{set.front(), set.front()};
    for (double e : set) {
        hull.lo = std::min(hull.lo, e);
        hull.hi = std::max(hull.hi, e);
    }
    return hull;
}

struct Parameter {
    std::string name;
    UnitTag unit = UnitTag::unitless;
    Domain domain = Interval{0.0, 0.0};
    bool derived = false;         // value computed by a define rule
    std::string define_rule_id;   // set iff derived

    bool operator==(const Parameter&) const = default;
};

enum class ObjectKind { road_section, lane, signal, guard_rail, vehicle, maneuver_event, environment };

inline std::string_view to_string(ObjectKind k) {
    switch (k) {
        case ObjectKind::road_section: return "road_section";
        case ObjectKind::lane: return "lane";
        case ObjectKind::signal: return "signal";
        case ObjectKind::guard_rail: return "guard_rail";
        case ObjectKind::vehicle: return "vehicle";
        case ObjectKind::maneuver_event: return "maneuver_event";
        case ObjectKind::environment: return "environment";
    }
    return "";
}

struct ObjectNode {
    std::string id;
    ObjectKind kind = ObjectKind::road_section;
    LayerId layer = LayerId::L1;
    std::vector<Parameter> parameters;
    // Structural facts fixed by the keyword expansion (alignment kind, grid
    // position, vehicle class ...); never varied, so not Parameters.
    std::map<std::string, std::string> attrs;

    bool operator==(const ObjectNode&) const = default;

    const Parameter* find_parameter(const std::string& name) const {
        for (const auto& p : parameters) {
            if (p.name == name) return &p;
        }
        return nullptr;
    }
    std::string attr(const std::string& key, const std::string& fallback = "") const {
        auto it = attrs.find(key);
        return it == attrs.end() ? fallback : it->second;
    }
};

enum class RelationKind { arrangement, object_dependency, parameter_dependency };
enum class ArrangementLabel { lane_of, left_neighbor, ahead_of, positioned_on };

inline std::string_view to_string(ArrangementLabel l) {
    switch (l) {
        case ArrangementLabel::lane_of: return "lane_of";
        case ArrangementLabel::left_neighbor: return "left_neighbor";
        case ArrangementLabel::ahead_of: return "ahead_of";
        case ArrangementLabel::positioned_on: return "positioned_on";
    }
    return "";
}

// Arrangement relations carry a label and no rule; dependency relations carry
// exactly one rule id into ParameterSpace::rules.
struct Relation {
    RelationKind kind = RelationKind::arrangement;
    std::vector<std::string> endpoints;  // ordered object ids
    std::optional<ArrangementLabel> label;
    std::string rule_id;

    bool operator==(const Relation&) const = default;
};

enum class RuleRole { check, define };

struct ConstraintRule {
    std::string id;
    RuleRole role = RuleRole::check;
    Expr lhs;       // define rules: a single parameter reference (the target)
    Cmp cmp = Cmp::eq;
    Expr rhs;

    bool operator==(const ConstraintRule&) const = default;

    std::vector<ParamRef> scope() const {
        std::vector<ParamRef> refs;
        collect_refs(lhs, refs);
        collect_refs(rhs, refs);
        return refs;
    }
    ParamRef define_target() const { return lhs.ref; }
    std::string canonical_text() const { return print_rule_expr(lhs, cmp, rhs); }
};

inline ConstraintRule make_check_rule(std::string id, Expr lhs, Cmp cmp, Expr rhs) {
    return ConstraintRule{std::move(id), RuleRole::check, std::move(lhs), cmp, std::move(rhs)};
}

inline ConstraintRule make_define_rule(std::string id, ParamRef target, Expr rhs) {
    return ConstraintRule{std::move(id), RuleRole::define, Expr::param(std::move(target)), Cmp::eq,
                          std::move(rhs)};
}

// The intermediate representation between detailing and the emitters:
// objects with typed parameters, arrangement relations and constraint rules.
// Immutable after detailing; all evaluation is pure.
struct ParameterSpace {
    std::vector<ObjectNode> objects;       // declaration order
    std::vector<Relation> relations;
    std::vector<ConstraintRule> rules;     // declaration order
    ParamRef grid_spacing{"road", "d_slot"};
    ParamRef section_length{"road", "L"};

    bool operator==(const ParameterSpace&) const = default;

    const ObjectNode* find_object(const std::string& id) const {
        for (const auto& o : objects) {
            if (o.id == id) return &o;
        }
        return nullptr;
    }
    const Parameter* find_parameter(const ParamRef& ref) const {
        const ObjectNode* o = find_object(ref.object);
        return o ? o->find_parameter(ref.name) : nullptr;
    }
    const ConstraintRule* find_rule(const std::string& id) const {
        for (const auto& r : rules) {
            if (r.id == id) return &r;
        }
        return nullptr;
    }

    // Declared domains as interval hulls, keyed by parameter path.
    RangeMap ranges() const {
        RangeMap out;
        for (const auto& o : objects) {
            for (const auto& p : o.parameters) {
                out[o.id + "." + p.name] = domain_hull(p.domain);
            }
        }
        return out;
    }
};

// One concrete scenario: a value for every parameter of the space.
struct ConcreteValuation {
    enum class Provenance { defaults, sampled };

    ValueMap values;  // keyed by "object.name"
    std::optional<std::uint64_t> seed;
    Provenance provenance = Provenance::defaults;

    double at(const ParamRef& ref) const { return values.at(ref.path()); }
    bool operator==(const ConcreteValuation&) const = default;
};

// ---------------------------------------------------------------------------
// topological_order

struct CycleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Orders every parameter so that each define rule's inputs precede its
// target. Independent parameters keep declaration order. Throws CycleError
// naming the offending rule ids when the define-rule graph has a cycle.
inline std::vector<ParamRef> topological_order(const ParameterSpace& ps) {
    std::vector<ParamRef> decl;
    std::map<std::string, size_t> index;
    for (const auto& o : ps.objects) {
        for (const auto& p : o.parameters) {
            ParamRef ref{o.id, p.name};
            index[ref.path()] = decl.size();
            decl.push_back(std::move(ref));
        }
    }

    // dependencies[i] = indices that must precede parameter i
    std::vector<std::vector<size_t>> deps(decl.size());
    std::map<size_t, std::string> rule_of_target;
    for (const auto& rule : ps.rules) {
        if (rule.role != RuleRole::define) continue;
        auto target_it = index.find(rule.define_target().path());
        if (target_it == index.end()) continue;
        rule_of_target[target_it->second] = rule.id;
        std::vector<ParamRef> inputs;
        collect_refs(rule.rhs, inputs);
        for (const auto& in : inputs) {
            auto in_it = index.find(in.path());
            if (in_it != index.end()) deps[target_it->second].push_back(in_it->second);
        }
    }

    std::vector<ParamRef> order;
    order.reserve(decl.size());
    std::vector<bool> placed(decl.size(), false);
    bool progress = true;
    while (order.size() < decl.size() && progress) {
        progress = false;
        for (size_t i = 0; i < decl.size(); ++i) {
            if (placed[i]) continue;
            bool ready = true;
            for (size_t d : deps[i]) {
                if (!placed[d]) {
                    ready = false;
                    break;
                }
            }
            if (ready) {
                placed[i] = true;
                order.push_back(decl[i]);
                progress = true;
            }
        }
    }
    if (order.size() < decl.size()) {
        std::string cycle;
        for (size_t i = 0; i < decl.size(); ++i) {
            if (!placed[i] && rule_of_target.count(i)) {
                if (!cycle.empty()) cycle += ", ";
                cycle += rule_of_target[i];
            }
        }
        throw CycleError("define-rule cycle involving rules: " + cycle);
    }
    return order;
}

// ---------------------------------------------------------------------------
// evaluate_rule / check_valuation

struct RuleOutcome {
    enum class Kind { satisfied, violated, defines };

    Kind kind = Kind::satisfied;
    double residual = 0.0;   // signed margin of check rules (>= 0 when satisfied)
    double value = 0.0;      // computed target of define rules
    std::string diagnostic;  // set when evaluation itself failed
};

namespace ps_detail {

inline double equality_tolerance(double a, double b) {
    return kDefineTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace ps_detail

// Check rules yield satisfied/violated with a signed margin; define rules
// yield the computed target value. Unresolved references and division by
// zero yield violated with a diagnostic.
inline RuleOutcome evaluate_rule(const ConstraintRule& rule, const ConcreteValuation& v) {
    RuleOutcome out;
    try {
        if (rule.role == RuleRole::define) {
            out.kind = RuleOutcome::Kind::defines;
            out.value = eval_expr(rule.rhs, v.values);
            return out;
        }
        const double lhs = eval_expr(rule.lhs, v.values);
        const double rhs = eval_expr(rule.rhs, v.values);
        bool satisfied = false;
        switch (rule.cmp) {
            case Cmp::lt:
                out.residual = rhs - lhs;
                satisfied = out.residual > 0.0;
                break;
            case Cmp::le:
                out.residual = rhs - lhs;
                satisfied = out.residual >= 0.0;
                break;
            case Cmp::ge:
                out.residual = lhs - rhs;
                satisfied = out.residual >= 0.0;
                break;
            case Cmp::gt:
                out.residual = lhs - rhs;
                satisfied = out.residual > 0.0;
                break;
            case Cmp::eq:
                out.residual = -std::abs(lhs - rhs);
                satisfied = std::abs(lhs - rhs) <= ps_detail::equality_tolerance(lhs, rhs);
                break;
        }
        out.kind = satisfied ? RuleOutcome::Kind::satisfied : RuleOutcome::Kind::violated;
    } catch (const EvalError& e) {
        out.kind = RuleOutcome::Kind::violated;
        out.diagnostic = e.what();
        out.residual = -std::numeric_limits<double>::infinity();
    }
    return out;
}

struct Violation {
    std::string subject;  // parameter path or rule id
    std::string message;
    double residual = 0.0;

    bool operator==(const Violation&) const = default;
};

// Empty iff every parameter is assigned inside its domain, every check rule
// holds, and every define rule reproduces the stored derived value within
// 1e-9 relative tolerance.
inline std::vector<Violation> check_valuation(const ParameterSpace& ps, const ConcreteValuation& v) {
    std::vector<Violation> out;
    for (const auto& o : ps.objects) {
        for (const auto& p : o.parameters) {
            const std::string path = o.id + "." + p.name;
            auto it = v.values.find(path);
            if (it == v.values.end()) {
                out.push_back({path, "parameter not assigned", 0.0});
                continue;
            }
            if (!domain_contains(p.domain, it->second)) {
                const Interval hull = domain_hull(p.domain);
                out.push_back({path,
                               "value " + format_number(it->second) + " outside range [" +
                                   format_number(hull.lo) + ", " + format_number(hull.hi) + "]",
                               -std::min(std::abs(it->second - hull.lo), std::abs(it->second - hull.hi))});
            }
        }
    }
    for (const auto& rule : ps.rules) {
        const RuleOutcome r = evaluate_rule(rule, v);
        if (r.kind == RuleOutcome::Kind::violated) {
            out.push_back({rule.id,
                           r.diagnostic.empty()
                               ? "rule violated: " + rule.canonical_text()
                               : "rule evaluation failed: " + r.diagnostic,
                           r.residual});
        } else if (r.kind == RuleOutcome::Kind::defines) {
            auto it = v.values.find(rule.define_target().path());
            if (it == v.values.end()) {
                out.push_back({rule.id, "derived parameter not assigned: " + rule.define_target().path(), 0.0});
            } else if (std::abs(it->second - r.value) > ps_detail::equality_tolerance(it->second, r.value)) {
                out.push_back({rule.id,
                               "derived value " + format_number(it->second) +
                                   " does not match define rule output " + format_number(r.value),
                               -std::abs(it->second - r.value)});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// feasible_bounds

namespace ps_detail {

// Inline-expands derived references so rules range over free parameters only.
inline Expr expand_defines(const Expr& e, const ParameterSpace& ps, int depth = 0) {
    if (depth > 16) throw EvalError("define expansion too deep");
    switch (e.op) {
        case Expr::Op::literal:
            return e;
        case Expr::Op::param: {
            const Parameter* p = ps.find_parameter(e.ref);
            if (p != nullptr && p->derived) {
                const ConstraintRule* rule = ps.find_rule(p->define_rule_id);
                if (rule != nullptr) return expand_defines(rule->rhs, ps, depth + 1);
            }
            return e;
        }
        default: {
            Expr out;
            out.op = e.op;
            if (e.a) out.a = std::make_shared<const Expr>(expand_defines(*e.a, ps, depth));
            if (e.b) out.b = std::make_shared<const Expr>(expand_defines(*e.b, ps, depth));
            return out;
        }
    }
}

}  // namespace ps_detail

// Per-parameter bounds of the rule-constrained feasible region, narrowed by
// interval arithmetic: x stays in the result iff some assignment of the other
// parameters inside their boxes can still satisfy every check rule. Assumes
// rule residuals are monotone in each single-occurrence parameter, which
// holds for the generated rule catalog.
inline RangeMap feasible_bounds(const ParameterSpace& ps) {
    RangeMap bounds = ps.ranges();

    std::vector<std::pair<std::string, Expr>> expanded;  // rule id, residual expr (feasible iff >= 0)
    for (const auto& rule : ps.rules) {
        if (rule.role != RuleRole::check || rule.cmp == Cmp::eq) continue;
        Expr lhs = ps_detail::expand_defines(rule.lhs, ps);
        Expr rhs = ps_detail::expand_defines(rule.rhs, ps);
        Expr residual = (rule.cmp == Cmp::ge || rule.cmp == Cmp::gt) ? lhs - rhs : rhs - lhs;
        expanded.emplace_back(rule.id, std::move(residual));
    }
    // A derived parameter's own range constrains the free parameters feeding
    // its define rule.
    for (const auto& o : ps.objects) {
        for (const auto& p : o.parameters) {
            if (!p.derived) continue;
            const ConstraintRule* define = ps.find_rule(p.define_rule_id);
            if (define == nullptr) continue;
            const Interval hull = domain_hull(p.domain);
            Expr rhs = ps_detail::expand_defines(define->rhs, ps);
            expanded.emplace_back(p.define_rule_id + ".range_lo", rhs - Expr::lit(hull.lo));
            expanded.emplace_back(p.define_rule_id + ".range_hi", Expr::lit(hull.hi) - rhs);
        }
    }

    for (int pass = 0; pass < 4; ++pass) {
        bool changed = false;
        for (const auto& [rule_id, residual] : expanded) {
            std::vector<ParamRef> refs;
            collect_refs(residual, refs);
            for (const auto& x : refs) {
                const Parameter* p = ps.find_parameter(x);
                if (p == nullptr || p->derived) continue;
                if (count_occurrences(residual, x) != 1) continue;
                Interval& box = bounds[x.path()];
                if (box.width() <= 0.0) continue;

                RangeMap pinned = bounds;
                auto sup_at = [&](double value) {
                    pinned[x.path()] = Interval::point(value);
                    return interval_eval(residual, pinned).hi;
                };
                const double sup_lo = sup_at(box.lo);
                const double sup_hi = sup_at(box.hi);
                if (sup_lo >= 0.0 && sup_hi >= 0.0) continue;  // no narrowing from this rule
                if (sup_lo < 0.0 && sup_hi < 0.0) continue;    // rule cannot narrow a single axis

                // One endpoint infeasible: bisect for the boundary.
                double feasible = sup_lo >= 0.0 ? box.lo : box.hi;
                double infeasible = sup_lo >= 0.0 ? box.hi : box.lo;
                for (int i = 0; i < 80; ++i) {
                    const double mid = (feasible + infeasible) / 2.0;
                    if (sup_at(mid) >= 0.0) {
                        feasible = mid;
                    } else {
                        infeasible = mid;
                    }
                }
                Interval narrowed = sup_lo >= 0.0 ? Interval{box.lo, feasible} : Interval{feasible, box.hi};
                if (narrowed.lo > box.lo + 1e-12 || narrowed.hi < box.hi - 1e-12) {
                    box = narrowed;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return bounds;
}

}  // namespace sforge
