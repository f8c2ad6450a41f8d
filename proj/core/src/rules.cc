#include "famrel/rules.h"

#include <algorithm>
#include <map>
#include <optional>

#include "famrel/error.h"
#include "famrel/relation.h"

namespace famrel {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t at = s.find(sep, pos);
    out.push_back(Trim(s.substr(pos, at - pos)));
    if (at == std::string_view::npos) break;
    pos = at + 1;
  }
  return out;
}

bool IsVariableName(std::string_view v) {
  if (v.empty() || v.front() < 'A' || v.front() > 'Z') return false;
  return std::all_of(v.begin(), v.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '_';
  });
}

class LineParser {
 public:
  LineParser(const std::string &source, int line) : source_(source), line_(line) {}

  [[noreturn]] void Fail(const std::string &what) const {
    throw ParseError(source_, line_, what);
  }

  int Variable(std::string_view name, std::vector<std::string> &vars,
               bool may_create) {
    if (!IsVariableName(name)) Fail("bad variable name '" + std::string(name) + "'");
    auto it = std::find(vars.begin(), vars.end(), name);
    if (it != vars.end()) return static_cast<int>(it - vars.begin());
    if (!may_create) {
      Fail("variable " + std::string(name) +
           " is not bound by an antecedent");
    }
    vars.emplace_back(name);
    return static_cast<int>(vars.size() - 1);
  }

  RelationPattern Pattern(std::string_view item, std::vector<std::string> &vars,
                          bool may_create) {
    if (item.size() < 2 || item.front() != '(' || item.back() != ')') {
      Fail("expected '(VAR, relation, VAR)', got '" + std::string(item) + "'");
    }
    const auto parts = Split(item.substr(1, item.size() - 2), ',');
    if (parts.size() != 3) Fail("relation pattern needs three fields");
    if (!IsKnownRelation(parts[1])) {
      Fail("unknown relation '" + std::string(parts[1]) + "'");
    }
    RelationPattern p;
    p.holder = Variable(parts[0], vars, may_create);
    p.relation = std::string(parts[1]);
    p.other = Variable(parts[2], vars, may_create);
    if (p.holder == p.other) Fail("pattern relates a variable to itself");
    return p;
  }

  std::optional<GenderGuard> Guard(std::string_view item,
                                   std::vector<std::string> &vars) {
    Gender g;
    if (item.starts_with("FEMALE(")) g = Gender::kFemale;
    else if (item.starts_with("MALE(")) g = Gender::kMale;
    else return std::nullopt;
    if (item.back() != ')') Fail("unterminated gender guard");
    const std::size_t open = item.find('(');
    const auto name = Trim(item.substr(open + 1, item.size() - open - 2));
    return GenderGuard{Variable(name, vars, false), g};
  }

 private:
  const std::string &source_;
  int line_;
};

RuleCategory InferCategory(const Rule &r) {
  if (r.antecedents.size() == 1) return RuleCategory::kCompliment;
  const bool same = std::all_of(
      r.antecedents.begin(), r.antecedents.end(), [&](const RelationPattern &p) {
        return SameGroup(p.relation, r.consequent.relation);
      });
  return same ? RuleCategory::kTransitivity : RuleCategory::kCompound;
}

Gender Flip(Gender g) {
  return g == Gender::kFemale ? Gender::kMale : Gender::kFemale;
}

// Gender each variable is fixed to by the base rule (gendered relations it
// holds, explicit guards). Throws on contradictory typing.
std::map<int, Gender> FixedGenders(const Rule &r) {
  std::map<int, Gender> fixed;
  auto fix = [&](int var, Gender g) {
    auto [it, inserted] = fixed.emplace(var, g);
    if (!inserted && it->second != g) {
      throw ParseError("rule " + r.id, r.line,
                       "ill-typed gender for variable " + r.variables[var]);
    }
  };
  auto from_pattern = [&](const RelationPattern &p) {
    const RelationInfo *info = FindRelation(p.relation);
    if (info->holder == GenderConstraint::kFemale) fix(p.holder, Gender::kFemale);
    if (info->holder == GenderConstraint::kMale) fix(p.holder, Gender::kMale);
  };
  for (const auto &p : r.antecedents) from_pattern(p);
  from_pattern(r.consequent);
  for (const auto &g : r.guards) fix(g.variable, g.gender);
  return fixed;
}

bool SameShape(const Rule &a, const Rule &b) {
  return a.antecedents == b.antecedents && a.guards == b.guards &&
         a.consequent == b.consequent;
}

}  // namespace

std::string_view RuleCategoryName(RuleCategory c) {
  switch (c) {
    case RuleCategory::kCompliment: return "compliment";
    case RuleCategory::kTransitivity: return "transitivity";
    case RuleCategory::kCompound: return "compound";
  }
  return "compound";
}

std::string_view RuleIdPrefix(RuleCategory c) {
  switch (c) {
    case RuleCategory::kCompliment: return "C";
    case RuleCategory::kTransitivity: return "T";
    case RuleCategory::kCompound: return "K";
  }
  return "K";
}

std::string Rule::ToString() const {
  auto pat = [&](const RelationPattern &p) {
    return "(" + variables[p.holder] + ", " + p.relation + ", " +
           variables[p.other] + ")";
  };
  std::string out(RuleCategoryName(category));
  out += " ";
  for (std::size_t i = 0; i < antecedents.size(); ++i) {
    if (i > 0) out += " & ";
    out += pat(antecedents[i]);
  }
  for (const auto &g : guards) {
    out += g.gender == Gender::kFemale ? " & FEMALE(" : " & MALE(";
    out += variables[g.variable] + ")";
  }
  return out + " => " + pat(consequent);
}

RuleSet ParseRules(std::string_view content, const std::string &source) {
  RuleSet set;
  int line_no = 0;
  while (!content.empty()) {
    ++line_no;
    const std::size_t nl = content.find('\n');
    std::string_view line = content.substr(0, nl);
    content = nl == std::string_view::npos ? std::string_view{}
                                           : content.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != line.npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;

    LineParser parser(source, line_no);
    Rule rule;
    rule.line = line_no;
    if (line.ends_with("!noexpand")) {
      rule.expand = false;
      line = Trim(line.substr(0, line.size() - 9));
    }
    std::optional<RuleCategory> category;
    for (RuleCategory c : {RuleCategory::kCompliment, RuleCategory::kTransitivity,
                           RuleCategory::kCompound}) {
      const std::string_view name = RuleCategoryName(c);
      if (line.starts_with(name) && line.size() > name.size() &&
          (line[name.size()] == ' ' || line[name.size()] == ':')) {
        category = c;
        line = Trim(line.substr(name.size() + 1));
        break;
      }
    }
    std::size_t arrow = line.find("=>");
    std::size_t arrow_len = 2;
    if (arrow == line.npos) {
      arrow = line.find("\xE2\x87\x92");  // ⇒
      arrow_len = 3;
    }
    if (arrow == line.npos) parser.Fail("missing '=>'");

    for (std::string_view item : Split(line.substr(0, arrow), '&')) {
      if (item.empty()) parser.Fail("empty antecedent");
      if (auto guard = parser.Guard(item, rule.variables)) {
        rule.guards.push_back(*guard);
      } else {
        rule.antecedents.push_back(parser.Pattern(item, rule.variables, true));
      }
    }
    if (rule.antecedents.empty() || rule.antecedents.size() > 2) {
      parser.Fail("a rule needs one or two relation antecedents");
    }
    rule.consequent = parser.Pattern(Trim(line.substr(arrow + arrow_len)),
                                     rule.variables, false);
    rule.category = category.value_or(InferCategory(rule));
    rule.id = std::string(RuleIdPrefix(rule.category)) +
              std::to_string(std::count_if(
                  set.base.begin(), set.base.end(),
                  [&](const Rule &r) { return r.category == rule.category; }) +
                  1);
    rule.base_id = rule.id;
    for (Rule &r : ExpandRule(rule)) set.expanded.push_back(std::move(r));
    set.base.push_back(std::move(rule));
  }
  return set;
}

RuleSet LoadRules(const std::filesystem::path &path) {
  return ParseRules(ReadFile(path), path.string());
}

std::vector<Rule> ExpandRule(const Rule &base) {
  const std::map<int, Gender> fixed = FixedGenders(base);
  std::vector<int> vars;
  for (const auto &[v, g] : fixed) vars.push_back(v);

  std::vector<Rule> out;
  auto push_unique = [&](Rule r) {
    for (const Rule &existing : out) {
      if (SameShape(existing, r)) return;
    }
    out.push_back(std::move(r));
  };

  if (!base.expand) {
    Rule r = base;
    r.guards.clear();
    for (const auto &[v, g] : fixed) r.guards.push_back({v, g});
    push_unique(std::move(r));
    return out;
  }

  const std::size_t combos = std::size_t{1} << vars.size();
  for (std::size_t mask = 0; mask < combos; ++mask) {
    std::map<int, Gender> assign;
    std::string tag;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const Gender g = (mask >> i) & 1 ? Flip(fixed.at(vars[i]))
                                       : fixed.at(vars[i]);
      assign[vars[i]] = g;
      tag += (i ? "," : "") + base.variables[vars[i]] + "=" +
             (g == Gender::kFemale ? "f" : "m");
    }
    auto gender_of = [&](int v) {
      auto it = assign.find(v);
      return it == assign.end() ? Gender::kUnknown : it->second;
    };
    auto specialize = [&](RelationPattern p) {
      if (assign.contains(p.holder)) {
        p.relation = SpecializeRelation(p.relation, assign[p.holder]);
      }
      return p;
    };
    auto invert = [&](const RelationPattern &p) {
      return RelationPattern{p.other, InverseRelation(p.relation, gender_of(p.other)),
                             p.holder};
    };

    Rule fwd = base;
    fwd.id = base.id + (tag.empty() ? "" : "/" + tag);
    fwd.guards.clear();
    for (const auto &[v, g] : assign) fwd.guards.push_back({v, g});
    for (auto &p : fwd.antecedents) p = specialize(p);
    fwd.consequent = specialize(fwd.consequent);

    Rule rev = fwd;
    rev.id = fwd.id + "/rev";
    for (auto &p : rev.antecedents) p = invert(p);
    rev.consequent = invert(rev.consequent);

    push_unique(std::move(fwd));
    push_unique(std::move(rev));
  }
  return out;
}

}  // namespace famrel
