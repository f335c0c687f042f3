#include "spf/interp.hpp"

#include <sstream>
#include <unordered_map>

#include "spf/error.hpp"
#include "spf/parse.hpp"

namespace spf {

namespace {

struct Machine {
  Instance &inst;
  int64_t limit;
  Counters c;
  std::unordered_map<std::string, int64_t> env;
  std::map<std::string, std::unordered_map<int64_t, int64_t>> hashes;
  std::map<std::string, std::vector<int64_t>> chains;
  int64_t steps = 0;

  void tick() {
    if (++steps > limit) throw Error("interp", "step limit exceeded");
  }

  int64_t var(const std::string &v) const {
    auto it = env.find(v);
    if (it != env.end()) return it->second;
    auto s = inst.scalars.find(v);
    if (s != inst.scalars.end()) return s->second;
    throw Error("interp", "unbound variable '" + v + "'");
  }

  int64_t load(const std::string &a, int64_t i) const {
    auto it = inst.ints.find(a);
    if (it == inst.ints.end()) throw Error("interp", "no index array '" + a + "'");
    if (i < 0 || i >= (int64_t)it->second.size())
      throw Error("interp", "read " + a + "[" + std::to_string(i) + "] out of bounds (size " +
                                std::to_string(it->second.size()) + ")");
    return it->second[i];
  }

  int64_t eval(const Expr &e) const {
    return e.eval([this](const std::string &v) { return var(v); },
                  [this](const std::string &a, int64_t i) { return load(a, i); });
  }

  double &real(const Expr &e) {
    if (e.op != Expr::Load) throw Error("interp", "value access must be an array element");
    auto it = inst.reals.find(e.name);
    if (it == inst.reals.end()) throw Error("interp", "no value array '" + e.name + "'");
    int64_t i = eval(e.kids[0]);
    if (i < 0 || i >= (int64_t)it->second.size())
      throw Error("interp", "access " + e.name + "[" + std::to_string(i) + "] out of bounds (size " +
                                std::to_string(it->second.size()) + ")");
    return it->second[i];
  }

  int64_t probe(const std::string &h, int64_t key) {
    ++c.probes;
    auto &m = hashes[h];
    auto it = m.find(key);
    return it == m.end() ? -1 : it->second;
  }

  void run(const std::vector<Node> &body) {
    for (auto &n : body) run(n);
  }

  void run(const Node &n) {
    tick();
    switch (n.kind) {
    case Node::Block: run(n.body); break;
    case Node::For: {
      int64_t &iters = c.iterations[n.var];
      env[n.var] = n.probe.empty() ? eval(n.init) : probe(n.probe, eval(n.init));
      while (eval(n.cond)) {
        tick();
        ++iters;
        run(n.body);
        int64_t &v = env[n.var];
        if (n.step == 0) {
          auto &ch = chains.at(n.next);
          if (v < 0 || v >= (int64_t)ch.size()) throw Error("interp", "chain index out of bounds");
          v = ch[v];
        } else {
          v += n.step;
        }
      }
      break;
    }
    case Node::While:
      while (eval(n.cond)) {
        tick();
        run(n.body);
      }
      break;
    case Node::If:
      if (eval(n.cond)) run(n.body);
      break;
    case Node::Assign:
      env[n.var] = n.probe.empty() ? eval(n.value) : probe(n.probe, eval(n.value));
      break;
    case Node::Advance:
      ++c.advances;
      env[n.var] += n.step;
      break;
    case Node::Accumulate: {
      double prod = 1;
      for (auto &f : n.factors) prod *= real(f);
      real(n.target) += prod;
      ++c.statements;
      break;
    }
    case Node::Call:
      ++c.statements;
      ++c.calls[n.var];
      break;
    case Node::Count: ++c.tiles; break;
    case Node::HashBuild: {
      auto &m = hashes[n.var];
      m.clear();
      int64_t lo = eval(n.lo), hi = eval(n.hi);
      if (!n.next.empty()) chains[n.next].assign(hi > 0 ? hi : 0, -1);
      for (int64_t p = hi - 1; p >= lo; --p) {
        tick();
        env[n.pos] = p;
        int64_t k = eval(n.key);
        if (!n.next.empty()) {
          auto it = m.find(k);
          chains[n.next][p] = it == m.end() ? -1 : it->second;
          m[k] = p;
        } else if (!m.count(k)) {
          m[k] = p;
        }
      }
      break;
    }
    case Node::HashFree:
      hashes.erase(n.var);
      if (!n.next.empty()) chains.erase(n.next);
      break;
    }
  }
};

} // namespace

Counters interpret(const Ast &ast, Instance &inst, int64_t stepLimit) {
  Machine m{inst, stepLimit, {}, {}, {}, {}, 0};
  m.run(ast.body);
  return m.c;
}

std::string Instance::str() const {
  std::ostringstream os;
  os.precision(17);
  for (auto &[k, v] : scalars) os << "scalar " << k << " = " << v << "\n";
  for (auto &[k, v] : ints) {
    os << "index " << k << " = [";
    for (size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << "]\n";
  }
  for (auto &[k, v] : reals) {
    os << "value " << k << " = [";
    for (size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << "]\n";
  }
  return os.str();
}

Instance Instance::parse(const std::string &text) {
  Instance inst;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind, name, eq;
    if (!(ls >> kind)) continue;
    auto bad = [&](const std::string &why) {
      return Error("instance", "line " + std::to_string(lineNo) + ": " + why);
    };
    if (!(ls >> name >> eq) || eq != "=") throw bad("expected '<kind> <name> = ...'");
    std::string rest;
    std::getline(ls, rest);
    if (kind == "scalar") {
      try {
        inst.scalars[name] = std::stoll(rest);
      } catch (std::exception &) {
        throw bad("bad integer");
      }
      continue;
    }
    if (kind != "index" && kind != "value") throw bad("unknown kind '" + kind + "'");
    auto l = rest.find('['), r = rest.rfind(']');
    if (l == std::string::npos || r == std::string::npos || r < l) throw bad("expected [..]");
    std::string body = rest.substr(l + 1, r - l - 1);
    for (char &ch : body)
      if (ch == ',') ch = ' ';
    std::istringstream bs(body);
    std::string tok;
    auto &iv = inst.ints[name];
    auto &rv = inst.reals[name];
    while (bs >> tok) {
      try {
        if (kind == "index") iv.push_back(std::stoll(tok));
        else rv.push_back(std::stod(tok));
      } catch (std::exception &) {
        throw bad("bad number '" + tok + "'");
      }
    }
    if (kind == "index") inst.reals.erase(name);
    else inst.ints.erase(name);
  }
  return inst;
}

} // namespace spf
