#include "spf/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "spf/error.hpp"

namespace spf {

const char *templateName(FindTemplate t) {
  switch (t) {
  case FindTemplate::None: return "none";
  case FindTemplate::SeqIter: return "seqiter";
  case FindTemplate::HashMap: return "hashmap";
  case FindTemplate::Fallback: return "loop";
  }
  return "?";
}

const char *directionName(Direction d) {
  return d == Direction::Increasing ? "increasing" : "decreasing";
}

FindPolicy parse_find_policy(const std::string &s) {
  if (s == "auto") return FindPolicy::Auto;
  if (s == "seqiter") return FindPolicy::SeqIter;
  if (s == "hashmap") return FindPolicy::HashMap;
  if (s == "loop") return FindPolicy::Loop;
  throw Error("cli", "unknown find policy '" + s + "' (auto, seqiter, hashmap, loop)");
}

std::string FindPlan::str() const {
  std::ostringstream os;
  os << var << ": " << templateName(tmpl);
  if (tmpl == FindTemplate::None) return os.str();
  os << " find " << find.constraint().str();
  if (tmpl == FindTemplate::SeqIter) {
    os << " " << directionName(dir);
    if (stop) os << " stop " << stop->str();
    os << " S={";
    for (size_t i = 0; i < state.size(); ++i) os << (i ? "," : "") << state[i];
    os << "}";
  }
  if (tmpl == FindTemplate::SeqIter || tmpl == FindTemplate::HashMap)
    os << (multi ? " multi" : " single");
  if (!note.empty()) os << " (" << note << ")";
  return os.str();
}

const std::string &FindSite::var() const { return scan->levels.at(level).var; }

namespace {

std::string primed(const std::string &v) { return v + "'"; }

std::map<std::string, AffineExpr> primeMap(const ExtendedIterationSpace &is) {
  std::map<std::string, AffineExpr> m;
  for (auto &v : is.space.tuple) m[v.name] = AffineExpr::var(primed(v.name));
  return m;
}

std::map<std::string, AffineExpr> identityMap(const ExtendedIterationSpace &is) {
  std::map<std::string, AffineExpr> m;
  for (auto &v : is.space.tuple) m[v.name] = AffineExpr::var(v.name);
  return m;
}

bool isBoundOf(const Constraint &c, const std::string &v) {
  return c.kind == Constraint::GE && c.expr.coeff(v) != 0 && !c.expr.mentionsInUf(v);
}

AffineExpr findApp(const FindSite &s) { return AffineExpr::atom(s.find.app); }

/// Clauses of every property of `uf` for the argument pair, one instance
/// per side. `use1`/`use2` are the arguments as written in the program;
/// properties guarded by layout variables only hold for the canonical one.
std::vector<Formula> propertyClauses(const ExtendedIterationSpace &is, const std::string &uf,
                                     const AffineExpr &use1, const AffineExpr &use2,
                                     const AffineExpr &arg1,
                                     const std::map<std::string, AffineExpr> &m1,
                                     const AffineExpr &arg2,
                                     const std::map<std::string, AffineExpr> &m2) {
  std::vector<Formula> out;
  for (auto &p : is.properties) {
    if (p.uf != uf) continue;
    if (p.guardsLayout) {
      if (!p.canonicalArg) continue;
      auto canon = AffineExpr::var(*p.canonicalArg);
      if (use1 != canon || use2 != canon) continue;
    }
    auto i1 = m1, i2 = m2;
    i1["a"] = arg1;
    i2["a"] = arg2;
    for (auto &f : instantiate_property(p, i1, i2)) out.push_back(f);
  }
  return out;
}

} // namespace

FindSite make_site(const ExtendedIterationSpace &is, const ScanResult &scan, int level,
                   const std::vector<FindPlan> &plans) {
  FindSite s;
  s.is = &is;
  s.scan = &scan;
  s.level = level;
  const LevelScan &lv = scan.levels.at(level);
  if (lv.finds.empty()) throw Error("synth", "level " + lv.var + " has no find condition");
  s.find = lv.finds[0];
  for (int k = 0; k < level; ++k) {
    const LevelScan &o = scan.levels[k];
    if (o.isAssign) continue;
    bool single = k < (int)plans.size() && plans[k].tmpl != FindTemplate::None && !plans[k].multi;
    if (!single) s.iterators.push_back(o.var);
  }
  // loop variable an assigned level depends on, if exactly one
  auto soleLoop = [&](int k) -> std::string {
    std::set<std::string> vs = scan.levels[k].value.vars(), loops;
    for (auto &v : vs) {
      int p = scan.position(v);
      if (p >= 0 && p < level && !scan.levels[p].isAssign) loops.insert(v);
    }
    return loops.size() == 1 ? *loops.begin() : "";
  };
  for (int k = 0; k < level; ++k) {
    if (!scan.levels[k].isAssign || !is.isComputation(scan.levels[k].var)) continue;
    std::string q = soleLoop(k);
    if (q.empty()) continue;
    for (int k2 = 0; k2 < level; ++k2)
      if (k2 != k && scan.levels[k2].isAssign && soleLoop(k2) == q) {
        s.reduced.push_back(scan.levels[k].var);
        break;
      }
  }
  const std::string &p = lv.var;
  s.simple = lv.lower.size() == 1 && lv.upper.size() == 1 && lv.lower[0].coef == 1 &&
             lv.upper[0].coef == 1 && s.find.app.args.size() == 1 &&
             s.find.app.args[0] == AffineExpr::var(p);
  if (!lv.lower.empty()) s.lo = lv.lower[0].expr;
  if (!lv.upper.empty()) s.hi = lv.upper[0].expr;
  return s;
}

std::map<std::string, AffineExpr> prime_map(const ExtendedIterationSpace &is) {
  return primeMap(is);
}

std::vector<Formula> pair_properties(const ExtendedIterationSpace &is,
                                     const std::vector<Constraint> &cs) {
  auto id = identityMap(is), pr = primeMap(is);
  std::map<std::string, std::vector<AffineExpr>> uses;
  for (auto &c : cs) {
    std::vector<Atom> apps;
    c.expr.collectApps(apps);
    for (auto &a : apps) {
      if (a.args.size() != 1) continue;
      auto &v = uses[a.name];
      if (std::find(v.begin(), v.end(), a.args[0]) == v.end()) v.push_back(a.args[0]);
    }
  }
  std::vector<Formula> out;
  for (auto &[uf, args] : uses)
    for (auto &e1 : args)
      for (auto &e2 : args)
        for (auto &cl : propertyClauses(is, uf, e1, e2, e1, id, e2.substitute(pr), pr))
          out.push_back(cl);
  return out;
}

TheoryComponent same_state(const std::vector<std::string> &state) {
  TheoryComponent t{"state", {}};
  for (auto &v : state)
    t.clauses.push_back(Formula::eq(AffineExpr::var(v), AffineExpr::var(primed(v))));
  return t;
}

std::vector<TheoryComponent> build_components(const FindSite &s) {
  const ExtendedIterationSpace &is = *s.is;
  const ScanResult &scan = *s.scan;
  auto id = identityMap(is), pr = primeMap(is);
  TheoryComponent order{"order", {}}, bounds{"bounds", {}}, context{"context", {}};
  TheoryComponent hit{"match", {}}, props{"properties", {}}, findProps{"find-properties", {}};

  std::vector<Formula> lex;
  for (size_t k = 0; k < s.iterators.size(); ++k) {
    std::vector<Formula> parts;
    for (size_t j = 0; j < k; ++j)
      parts.push_back(Formula::eq(AffineExpr::var(s.iterators[j]),
                                  AffineExpr::var(primed(s.iterators[j]))));
    parts.push_back(Formula::lt(AffineExpr::var(s.iterators[k]),
                                AffineExpr::var(primed(s.iterators[k]))));
    lex.push_back(Formula::conj(parts));
  }
  order.clauses.push_back(Formula::disj(lex));

  std::vector<Constraint> ctx;
  auto both = [&](TheoryComponent &t, const Constraint &c) {
    ctx.push_back(c);
    t.clauses.push_back(Formula::of(c));
    t.clauses.push_back(Formula::of(c.substitute(pr)));
  };
  for (auto &c : scan.preconditions) bounds.clauses.push_back(Formula::of(c));
  for (int k = 0; k < s.level; ++k)
    for (auto &c : scan.levels[k].primary) both(isBoundOf(c, scan.levels[k].var) ? bounds : context, c);
  for (auto &c : scan.levels[s.level].boundConstraints()) both(bounds, c);

  Constraint f = s.find.constraint();
  hit.clauses.push_back(Formula::of(f));
  hit.clauses.push_back(Formula::of(f.substitute(pr)));

  props.clauses = pair_properties(is, ctx);

  if (s.find.app.args.size() == 1) {
    const AffineExpr &arg = s.find.app.args[0];
    findProps.clauses = propertyClauses(is, s.find.app.name, arg, arg, arg, id, arg.substitute(pr), pr);
  }
  return {order, bounds, context, hit, props, findProps};
}

namespace {

enum { kOrder, kBounds, kContext, kMatch, kProps, kFindProps };

void append(std::vector<Formula> &dst, const std::vector<Formula> &src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

std::string stateText(const std::vector<std::string> &s) {
  std::string r = "S{";
  for (size_t i = 0; i < s.size(); ++i) r += (i ? "," : "") + s[i];
  return r + "}";
}

} // namespace

Synthesizer::Synthesizer(const FindSite &site, const SynthOptions &opt,
                         std::vector<QueryRecord> *log)
    : site_(site), opt_(opt), log_(log), comps_(build_components(site)) {}

Verdict Synthesizer::run(const std::string &name, std::vector<Formula> fs) {
  Verdict v = Verdict::Unknown;
  try {
    SolverOptions so;
    so.nodeBudget = opt_.nodeBudget;
    v = solve(fs, so).verdict;
  } catch (const Error &) {
    v = Verdict::Unknown;
  }
  if (log_ && opt_.record) log_->push_back({site_.var(), name, std::move(fs), v});
  return v;
}

std::vector<Formula> Synthesizer::context() const {
  std::vector<Formula> r;
  for (int k : {kOrder, kBounds, kContext, kProps}) append(r, comps_[k].clauses);
  return r;
}

Constraint Synthesizer::stopCondition(bool greater) const {
  AffineExpr f = findApp(site_);
  return greater ? Constraint::gt(site_.find.key, f) : Constraint::lt(site_.find.key, f);
}

namespace {

/// Formulas of one query instance: enclosing constraints, and helpers to
/// talk about extra positions of the find variable.
struct Single {
  const FindSite &s;
  std::vector<Formula> outer;
  std::vector<Constraint> bounds;
  std::map<std::string, AffineExpr> id;

  explicit Single(const FindSite &site) : s(site), id(identityMap(*site.is)) {
    for (auto &c : s.scan->preconditions) outer.push_back(Formula::of(c));
    for (int k = 0; k < s.level; ++k)
      for (auto &c : s.scan->levels[k].primary) outer.push_back(Formula::of(c));
    bounds = s.scan->levels[s.level].boundConstraints();
  }
  std::string fresh(const std::string &tag) const {
    std::set<std::string> taken;
    for (auto &v : s.is->space.tuple) taken.insert(v.name);
    return freshName(s.var() + "_" + tag, taken);
  }
  std::map<std::string, AffineExpr> at(const std::string &q) const {
    return {{s.var(), AffineExpr::var(q)}};
  }
  void boundsAt(std::vector<Formula> &fs, const std::string &q) const {
    for (auto &c : bounds) fs.push_back(Formula::of(c.substitute(at(q))));
  }
  AffineExpr F(const std::string &q) const { return findApp(s).substitute(at(q)); }
  void props(std::vector<Formula> &fs, const std::string &q1, const std::string &q2) const {
    if (s.find.app.args.size() != 1) return;
    const AffineExpr &use = s.find.app.args[0];
    append(fs, propertyClauses(*s.is, s.find.app.name, use, use, use.substitute(at(q1)), id,
                               use.substitute(at(q2)), id));
  }
  Formula before(const std::string &a, const std::string &b, Direction d) const {
    return d == Direction::Increasing ? Formula::lt(AffineExpr::var(a), AffineExpr::var(b))
                                      : Formula::gt(AffineExpr::var(a), AffineExpr::var(b));
  }
};

} // namespace

bool Synthesizer::check_seqiter(Direction dir, const Constraint &stop,
                                const std::vector<std::string> &state, bool multi) {
  const std::string &p = site_.var();
  auto pr = primeMap(*site_.is);
  Single one(site_);
  AffineExpr key = site_.find.key, keyP = key.substitute(pr);
  AffineExpr F = findApp(site_), FP = F.substitute(pr);
  std::string tag = std::string("seqiter.") + (dir == Direction::Increasing ? "inc" : "dec") +
                    "." + (stop == Constraint::gt(key, F) ? "gt" : "lt");
  auto unsat = [&](const std::string &name, std::vector<Formula> fs) {
    return run(tag + "." + name, std::move(fs)) == Verdict::Unsat;
  };
  auto cached = [&](const std::string &k, auto fn) {
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    bool r = fn();
    cache_[k] = r;
    return r;
  };

  // no match past the point where the scan stops
  bool imp = cached(tag + ".imp", [&] {
    std::string s = one.fresh("s"), x = one.fresh("x");
    std::vector<Formula> fs = one.outer;
    one.boundsAt(fs, s);
    one.boundsAt(fs, x);
    fs.push_back(Formula::neg(Formula::of(stop.substitute(one.at(s)))));
    fs.push_back(Formula::ne(one.F(s), key));
    fs.push_back(one.before(s, x, dir));
    fs.push_back(Formula::eq(one.F(x), key));
    one.props(fs, s, x);
    return unsat("imp", fs);
  });
  if (!imp) return false;
  if (multi) {
    // matches of one query are contiguous in scan order
    bool gap = cached(tag + ".gap", [&] {
      std::string x = one.fresh("x"), y = one.fresh("y"), z = one.fresh("z");
      std::vector<Formula> fs = one.outer;
      for (auto &q : {x, y, z}) one.boundsAt(fs, q);
      fs.push_back(Formula::eq(one.F(x), key));
      fs.push_back(one.before(x, y, dir));
      fs.push_back(one.before(y, z, dir));
      fs.push_back(Formula::ne(one.F(y), key));
      fs.push_back(Formula::eq(one.F(z), key));
      one.props(fs, x, y);
      one.props(fs, y, z);
      one.props(fs, x, z);
      return unsat("gap", fs);
    });
    if (!gap) return false;
  }

  std::string st = "." + stateText(state);
  auto sameState = same_state(state).clauses;
  std::vector<Formula> must = context();
  append(must, comps_[kMatch].clauses);
  append(must, sameState);
  must.push_back(Formula::conj({Formula::ne(FP, key), Formula::ne(F, keyP)}));
  append(must, comps_[kFindProps].clauses);
  must.push_back(dir == Direction::Increasing
                     ? Formula::ge(AffineExpr::var(p), AffineExpr::var(primed(p)))
                     : Formula::le(AffineExpr::var(p), AffineExpr::var(primed(p))));
  if (!unsat("must" + st, must)) return false;

  // a position the earlier query skips never matches a later one
  std::vector<Formula> skip = context();
  append(skip, sameState);
  skip.push_back(comps_[kMatch].clauses[1]);
  append(skip, comps_[kFindProps].clauses);
  skip.push_back(Formula::of(stop.substitute({{p, AffineExpr::var(primed(p))}})));
  if (!unsat("skip" + st, skip)) return false;

  if (!multi) {
    std::vector<Formula> excl = context();
    append(excl, comps_[kMatch].clauses);
    append(excl, sameState);
    excl.push_back(Formula::disj({Formula::eq(FP, key), Formula::eq(F, keyP)}));
    if (!unsat("excl" + st, excl)) return false;
  }
  return true;
}

std::optional<bool> Synthesizer::check_hashmap() {
  if (!site_.simple) return std::nullopt;
  auto it = cache_.find("uniq");
  if (it != cache_.end()) return !it->second;
  Single one(site_);
  std::string x = one.fresh("x");
  const std::string &p = site_.var();
  std::vector<Formula> fs = one.outer;
  one.boundsAt(fs, p);
  one.boundsAt(fs, x);
  fs.push_back(Formula::eq(one.F(p), site_.find.key));
  fs.push_back(Formula::eq(one.F(x), site_.find.key));
  fs.push_back(Formula::ne(AffineExpr::var(p), AffineExpr::var(x)));
  one.props(fs, p, x);
  bool single = run("uniq", fs) == Verdict::Unsat;
  cache_["uniq"] = single;
  return !single;
}

std::optional<std::vector<std::string>> Synthesizer::determine_state_indices(
    Direction dir, const Constraint &stop, bool multi, const std::vector<std::string> &cands) {
  std::vector<std::string> S = cands;
  if (!check_seqiter(dir, stop, S, multi)) return std::nullopt;
  for (auto &v : cands) {
    std::vector<std::string> trial;
    for (auto &x : S)
      if (x != v) trial.push_back(x);
    if (check_seqiter(dir, stop, trial, multi)) S = trial;
  }
  return S;
}

FindPlan Synthesizer::synthesize() {
  const ScanResult &scan = *site_.scan;
  FindPlan plan;
  plan.var = site_.var();
  plan.find = site_.find;
  plan.lo = site_.lo;
  plan.hi = site_.hi;
  plan.tmpl = FindTemplate::Fallback;
  FindPolicy pol = opt_.policy;
  auto refuse = [&](const std::string &why) {
    throw Error("synth", std::string(pol == FindPolicy::SeqIter ? "seqiter" : "hashmap") +
                             " cannot be applied to loop " + plan.var + ": " + why);
  };
  std::optional<bool> multi = check_hashmap();
  plan.multi = multi.value_or(true);
  if (pol == FindPolicy::Loop) return plan;
  if (!site_.simple) {
    if (pol != FindPolicy::Auto)
      refuse("needs one unit lower and upper bound and a find on the loop variable itself");
    plan.note = "find is not a plain lookup";
    return plan;
  }
  bool auto_ = pol == FindPolicy::Auto;
  if (auto_ && site_.iterators.empty()) {
    plan.note = "runs once";
    return plan;
  }

  auto posOf = [&](const std::string &v) { return scan.position(v); };
  auto maxPos = [&](const AffineExpr &e) {
    int m = -1;
    for (auto &v : e.vars()) m = std::max(m, posOf(v));
    return m;
  };
  int boundPos = std::max(maxPos(site_.lo), maxPos(site_.hi));

  if (pol == FindPolicy::Auto || pol == FindPolicy::SeqIter) {
    std::vector<std::string> M(site_.iterators.rbegin(), site_.iterators.rend());
    M.insert(M.end(), site_.reduced.rbegin(), site_.reduced.rend());
    std::optional<FindPlan> best;
    std::string why = "assumptions not provable";
    for (Direction d : {Direction::Increasing, Direction::Decreasing})
      for (bool greater : {true, false}) {
        Constraint stop = stopCondition(greater);
        auto S = determine_state_indices(d, stop, plan.multi, M);
        if (!S) continue;
        // widen S until no member lives inside the init point (no keyed state)
        int init = site_.level;
        bool widened = false;
        for (;;) {
          init = site_.level;
          std::string first;
          for (auto &it : site_.iterators)
            if (std::find(S->begin(), S->end(), it) == S->end()) {
              init = posOf(it);
              first = it;
              break;
            }
          bool keyed = false;
          for (auto &v : *S)
            if (posOf(v) >= init) keyed = true;
          if (!keyed) break;
          S->push_back(first);
          widened = true;
        }
        if (widened && !check_seqiter(d, stop, *S, plan.multi)) continue;
        bool coversAll = true;
        for (auto &it : site_.iterators)
          if (std::find(S->begin(), S->end(), it) == S->end()) coversAll = false;
        if (boundPos >= init) {
          why = "scan range not known where the state starts";
          continue;
        }
        if (auto_ && coversAll) {
          why = "state resets on every enclosing iteration";
          continue;
        }
        if (best && best->state.size() <= S->size()) continue;
        FindPlan c = plan;
        c.tmpl = FindTemplate::SeqIter;
        c.dir = d;
        c.stop = stop;
        c.stopGreater = greater;
        c.state = *S;
        c.initLevel = init;
        best = c;
      }
    if (best) return *best;
    if (pol == FindPolicy::SeqIter) refuse(why);
    plan.note = "seqiter: " + why;
  }
  plan.tmpl = FindTemplate::HashMap;
  plan.initLevel = boundPos + 1;
  return plan;
}

SynthResult synthesize_all(const ExtendedIterationSpace &is, const ScanResult &scan,
                           const SynthOptions &opt) {
  SynthResult r;
  for (size_t k = 0; k < scan.levels.size(); ++k) {
    const LevelScan &lv = scan.levels[k];
    if (lv.isAssign || lv.finds.empty()) {
      FindPlan p;
      p.var = lv.var;
      r.plans.push_back(p);
      continue;
    }
    FindSite site = make_site(is, scan, (int)k, r.plans);
    Synthesizer s(site, opt, &r.queries);
    FindPlan p = s.synthesize();
    p.extraFinds.assign(lv.finds.begin() + 1, lv.finds.end());
    r.plans.push_back(p);
  }
  return r;
}

std::vector<std::string> dump_queries(const std::vector<QueryRecord> &qs, const std::string &dir,
                                      const std::string &prefix) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> files;
  for (size_t i = 0; i < qs.size(); ++i) {
    const QueryRecord &q = qs[i];
    std::string name = prefix + std::to_string(i) + "_" + q.loop + "_" + q.name;
    for (char &c : name)
      if (!isalnum((unsigned char)c) && c != '_' && c != '.' && c != '-') c = '_';
    fs::path path = fs::path(dir) / (name + ".smt2");
    std::ofstream out(path);
    if (!out) throw Error("cli", "cannot write " + path.string());
    out << toSmtLib(q.clauses, q.loop + " " + q.name + ": " + verdictName(q.verdict));
    files.push_back(path.string());
  }
  return files;
}

} // namespace spf
