#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace ciff {

using VarId = std::int64_t;

enum class TermKind : std::uint8_t { Var, Const, Int, Compound, Arith };
enum class ArithOp : std::uint8_t { Add, Sub, Mul, Abs };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable first-order term. Variables are identified by `id`; `name` is
// only a display hint.
struct Term {
    TermKind kind = TermKind::Const;
    std::string name;        // variable name, constant or functor
    std::int64_t value = 0;  // variable id or integer value
    ArithOp op = ArithOp::Add;
    std::vector<TermPtr> args;

    bool is_var() const { return kind == TermKind::Var; }
    VarId var_id() const { return value; }
};

TermPtr make_var(std::string name, VarId id);
TermPtr make_const(std::string name);
TermPtr make_int(std::int64_t value);
TermPtr make_compound(std::string functor, std::vector<TermPtr> args);
TermPtr make_arith(ArithOp op, std::vector<TermPtr> operands);

const char* arith_symbol(ArithOp op);

bool term_equal(const TermPtr& a, const TermPtr& b);
// Total structural order; variables compare by id.
int term_compare(const TermPtr& a, const TermPtr& b);

void collect_vars(const TermPtr& t, std::set<VarId>& out);
void collect_vars_ordered(const TermPtr& t, std::vector<VarId>& out);
bool occurs(VarId v, const TermPtr& t);
bool is_ground(const TermPtr& t);
// True when the term contains no arithmetic expression node.
bool is_herbrand(const TermPtr& t);

using Substitution = std::map<VarId, TermPtr>;
TermPtr substitute(const TermPtr& t, const Substitution& s);

// Replaces every variable id in `ids` by a fresh variable with the same name.
class Renamer {
public:
    explicit Renamer(VarId* counter) : counter_(counter) {}
    TermPtr rename(const TermPtr& t);
    const Substitution& mapping() const { return map_; }
    void restrict_to(const std::set<VarId>& ids) { only_ = ids; restricted_ = true; }

private:
    VarId* counter_;
    Substitution map_;
    std::set<VarId> only_;
    bool restricted_ = false;
};

// Assigns unique display names to variables in first-seen order.
class VarNamer {
public:
    std::string name_of(const Term& var);

private:
    std::map<VarId, std::string> names_;
    std::set<std::string> taken_;
};

std::string to_string(const TermPtr& t, VarNamer* namer = nullptr);

}  // namespace ciff
