#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>

#include "smartws/model.hpp"
#include "smartws/text.hpp"

namespace smartws {

// In-memory triple set. Terms are interned into a dictionary and triples are
// kept in three orderings (SPO, POS, OSP) so any bound prefix of a pattern
// can be resolved with a range scan. Grows monotonically; there is no
// retraction. Const access (contains/match/triples) is safe from several
// threads as long as nobody inserts concurrently.
class KnowledgeBase {
public:
    std::size_t insert(const Triple& t) {
        std::uint32_t s = intern(Term{t.subject});
        std::uint32_t p = intern(Term{t.predicate});
        std::uint32_t o = intern(t.object);
        if (!spo_.insert({s, p, o}).second) return 0;
        pos_.insert({p, o, s});
        osp_.insert({o, s, p});
        return 1;
    }

    std::size_t insert(const std::vector<Triple>& triples) {
        std::size_t added = 0;
        for (const auto& t : triples) added += insert(t);
        return added;
    }

    bool contains(const Triple& t) const {
        auto s = find_id(Term{t.subject});
        auto p = find_id(Term{t.predicate});
        auto o = find_id(t.object);
        if (!s || !p || !o) return false;
        return spo_.count({*s, *p, *o}) > 0;
    }

    std::size_t size() const { return spo_.size(); }
    bool empty() const { return spo_.empty(); }

    // All triples in canonical (subject, predicate, object) text order.
    std::vector<Triple> triples() const {
        std::vector<Triple> out;
        out.reserve(spo_.size());
        for (const auto& k : spo_) out.push_back(decode(k));
        std::sort(out.begin(), out.end(), triple_less);
        return out;
    }

    // All bindings whose domain is exactly the pattern's variable set and
    // under which every pattern triple is present in the store. `seed`
    // pre-binds any of the pattern's variables it mentions; entries for
    // foreign variables are ignored. Result order is canonical: sorted by
    // the bound terms' text in variable-name order.
    std::vector<Binding> match(const GraphPattern& pattern, const Binding& seed = {}) const {
        Binding current;
        auto vars = pattern.vars();
        for (const auto& [name, term] : seed)
            if (vars.count(name)) current[name] = term;

        std::vector<Binding> results;
        match_from(pattern, 0, current, results);

        std::sort(results.begin(), results.end(), [](const Binding& a, const Binding& b) {
            return binding_text(a) < binding_text(b);
        });
        results.erase(std::unique(results.begin(), results.end()), results.end());
        return results;
    }

private:
    using Key = std::array<std::uint32_t, 3>;

    std::vector<Term> terms_;
    std::map<std::string, std::uint32_t> ids_;  // canonical term text -> id
    std::set<Key> spo_, pos_, osp_;

    std::uint32_t intern(const Term& t) {
        std::string text = term_text(t);
        auto it = ids_.find(text);
        if (it != ids_.end()) return it->second;
        auto id = static_cast<std::uint32_t>(terms_.size());
        terms_.push_back(t);
        ids_.emplace(std::move(text), id);
        return id;
    }

    std::optional<std::uint32_t> find_id(const Term& t) const {
        auto it = ids_.find(term_text(t));
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    Triple decode(const Key& k) const {
        Triple t;
        t.subject = std::get<Iri>(terms_[k[0]]);
        t.predicate = std::get<Iri>(terms_[k[1]]);
        t.object = terms_[k[2]];
        return t;
    }

    // Enumerates index keys matching an optionally-bound (a, b) prefix.
    template <typename Fn>
    void scan(const std::set<Key>& index, std::optional<std::uint32_t> a,
              std::optional<std::uint32_t> b, Fn&& fn) const {
        if (!a) {
            for (const auto& k : index) fn(k);
            return;
        }
        auto it = index.lower_bound({*a, b ? *b : 0, 0});
        for (; it != index.end(); ++it) {
            if ((*it)[0] != *a) break;
            if (b && (*it)[1] != *b) break;
            fn(*it);
        }
    }

    struct Resolved {
        std::optional<std::uint32_t> s, p, o;
        std::array<const std::string*, 3> free{nullptr, nullptr, nullptr};
        bool impossible = false;
    };

    Resolved resolve(const TriplePattern& tp, const Binding& current) const {
        Resolved r;
        auto fix = [&](const Term& t, std::optional<std::uint32_t>& slot) {
            auto id = find_id(t);
            if (!id) r.impossible = true;
            else slot = *id;
        };
        auto position = [&](const auto& field, int idx, std::optional<std::uint32_t>& slot) {
            using T = std::decay_t<decltype(field)>;
            if constexpr (std::is_same_v<T, std::variant<Variable, Iri>>) {
                if (auto* v = std::get_if<Variable>(&field)) {
                    auto it = current.find(v->name);
                    if (it != current.end()) fix(it->second, slot);
                    else r.free[idx] = &v->name;
                } else {
                    fix(Term{std::get<Iri>(field)}, slot);
                }
            } else {
                if (auto* v = std::get_if<Variable>(&field)) {
                    auto it = current.find(v->name);
                    if (it != current.end()) fix(it->second, slot);
                    else r.free[idx] = &v->name;
                } else if (auto* i = std::get_if<Iri>(&field)) {
                    fix(Term{*i}, slot);
                } else {
                    fix(Term{std::get<Literal>(field)}, slot);
                }
            }
        };
        position(tp.subject, 0, r.s);
        position(tp.predicate, 1, r.p);
        position(tp.object, 2, r.o);
        return r;
    }

    void match_from(const GraphPattern& pattern, std::size_t i, Binding& current,
                    std::vector<Binding>& results) const {
        if (i == pattern.patterns.size()) {
            results.push_back(current);
            return;
        }
        Resolved r = resolve(pattern.patterns[i], current);
        if (r.impossible) return;

        auto try_key = [&](std::uint32_t s, std::uint32_t p, std::uint32_t o) {
            if (r.s && *r.s != s) return;
            if (r.p && *r.p != p) return;
            if (r.o && *r.o != o) return;
            // Extend by the free positions; a variable repeated within the
            // pattern must resolve to one id.
            std::array<std::uint32_t, 3> got{s, p, o};
            std::vector<std::string> bound_here;
            bool ok = true;
            for (int pos = 0; pos < 3 && ok; ++pos) {
                if (!r.free[pos]) continue;
                const std::string& name = *r.free[pos];
                auto it = current.find(name);
                if (it != current.end()) {
                    auto id = find_id(it->second);
                    if (!id || *id != got[pos]) ok = false;
                } else {
                    current[name] = terms_[got[pos]];
                    bound_here.push_back(name);
                }
            }
            if (ok) match_from(pattern, i + 1, current, results);
            for (const auto& name : bound_here) current.erase(name);
        };

        if (r.s && r.p && r.o) {
            if (spo_.count({*r.s, *r.p, *r.o})) try_key(*r.s, *r.p, *r.o);
        } else if (r.s) {
            scan(spo_, r.s, r.p, [&](const Key& k) { try_key(k[0], k[1], k[2]); });
        } else if (r.p) {
            scan(pos_, r.p, r.o, [&](const Key& k) { try_key(k[2], k[0], k[1]); });
        } else if (r.o) {
            scan(osp_, r.o, std::nullopt, [&](const Key& k) { try_key(k[1], k[2], k[0]); });
        } else {
            scan(spo_, std::nullopt, std::nullopt, [&](const Key& k) { try_key(k[0], k[1], k[2]); });
        }
    }
};

inline std::vector<Binding> match_pattern(const GraphPattern& p, const KnowledgeBase& kb,
                                          const Binding& seed = {}) {
    return kb.match(p, seed);
}

inline std::string serialize(const KnowledgeBase& kb) { return serialize_triples(kb.triples()); }

inline KnowledgeBase kb_from(const std::vector<Triple>& triples) {
    KnowledgeBase kb;
    kb.insert(triples);
    return kb;
}

}  // namespace smartws
