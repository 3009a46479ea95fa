#include "spanproto/tape.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "spanproto/error.hpp"

namespace spanproto {

Var Tape::make(Mat value) {
  Node n;
  n.adjoint = Mat(value.rows, value.cols);
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  return Var{this, id, nodes_.back().value.rows, nodes_.back().value.cols};
}

void Tape::set_back(Var v, BackFn fn) {
  nodes_[static_cast<size_t>(v.id)].back = std::move(fn);
}

Var Tape::input(Mat value) { return make(std::move(value)); }

Var Tape::scalar(double v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return make(std::move(m));
}

Var Tape::param(ParameterRegistry& registry, int index) {
  Var v = make(registry.at(index).value);
  Node& n = nodes_[static_cast<size_t>(v.id)];
  n.registry = &registry;
  n.param_index = index;
  return v;
}

Var Tape::param(ParameterRegistry& registry, const std::string& name) {
  const int idx = registry.index_of(name);
  if (idx < 0) throw ConfigError("unknown parameter: " + name);
  return param(registry, idx);
}

void Tape::backward(Var loss) {
  assert(loss.tape == this && loss.rows == 1 && loss.cols == 1);
  grad_mut(loss.id)(0, 0) = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.back) n.back(*this, id);
    if (n.registry != nullptr) {
      Mat& g = n.registry->at(n.param_index).grad;
      assert(g.same_shape(n.adjoint));
      for (size_t k = 0; k < g.size(); ++k) g.a[k] += n.adjoint.a[k];
    }
  }
}

namespace {

void check_same_tape(Var a, Var b) {
  assert(a.tape != nullptr && a.tape == b.tape);
  (void)a;
  (void)b;
}

}  // namespace

Var add(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  assert(a.rows == b.rows && a.cols == b.cols);
  Mat out = t.val(a);
  const Mat& bv = t.val(b);
  for (size_t k = 0; k < out.size(); ++k) out.a[k] += bv.a[k];
  Var v = t.make(std::move(out));
  t.set_back(v, [pa = a.id, pb = b.id](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    Mat& ga = tp.grad_mut(pa);
    Mat& gb = tp.grad_mut(pb);
    for (size_t k = 0; k < g.size(); ++k) {
      ga.a[k] += g.a[k];
      gb.a[k] += g.a[k];
    }
  });
  return v;
}

Var scale(Var a, double c) {
  Tape& t = *a.tape;
  Mat out = t.val(a);
  for (double& x : out.a) x *= c;
  Var v = t.make(std::move(out));
  t.set_back(v, [pa = a.id, c](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    Mat& ga = tp.grad_mut(pa);
    for (size_t k = 0; k < g.size(); ++k) ga.a[k] += c * g.a[k];
  });
  return v;
}

Var add_rowvec(Var a, Var vrow) {
  check_same_tape(a, vrow);
  Tape& t = *a.tape;
  assert(vrow.rows == 1 && vrow.cols == a.cols);
  Mat out = t.val(a);
  const Mat& bv = t.val(vrow);
  for (int i = 0; i < out.rows; ++i) {
    for (int j = 0; j < out.cols; ++j) out(i, j) += bv(0, j);
  }
  Var v = t.make(std::move(out));
  t.set_back(v, [pa = a.id, pv = vrow.id](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    Mat& ga = tp.grad_mut(pa);
    Mat& gv = tp.grad_mut(pv);
    for (int i = 0; i < g.rows; ++i) {
      for (int j = 0; j < g.cols; ++j) {
        ga(i, j) += g(i, j);
        gv(0, j) += g(i, j);
      }
    }
  });
  return v;
}

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  assert(a.cols == b.rows);
  Mat out(a.rows, b.cols);
  matmul_acc(t.val(a), t.val(b), out);
  Var v = t.make(std::move(out));
  t.set_back(v, [pa = a.id, pb = b.id](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    matmul_nt_acc(g, tp.val(pb), tp.grad_mut(pa));  // dA += G B^T
    matmul_tn_acc(tp.val(pa), g, tp.grad_mut(pb));  // dB += A^T G
  });
  return v;
}

Var matmul_nt(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  assert(a.cols == b.cols);
  Mat out(a.rows, b.rows);
  matmul_nt_acc(t.val(a), t.val(b), out);
  Var v = t.make(std::move(out));
  t.set_back(v, [pa = a.id, pb = b.id](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    matmul_acc(g, tp.val(pb), tp.grad_mut(pa));     // dA += G B
    matmul_tn_acc(g, tp.val(pa), tp.grad_mut(pb));  // dB += G^T A
  });
  return v;
}

Var tanh_op(Var a) {
  Tape& t = *a.tape;
  Mat out = t.val(a);
  for (double& x : out.a) x = std::tanh(x);
  Var v = t.make(std::move(out));
  t.set_back(v, [pa = a.id](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    const Mat& y = tp.val(self);
    Mat& ga = tp.grad_mut(pa);
    for (size_t k = 0; k < g.size(); ++k) ga.a[k] += g.a[k] * (1.0 - y.a[k] * y.a[k]);
  });
  return v;
}

Var softmax_rows(Var a) {
  Tape& t = *a.tape;
  Mat out = t.val(a);
  for (int i = 0; i < out.rows; ++i) {
    double mx = out(i, 0);
    for (int j = 1; j < out.cols; ++j) mx = std::max(mx, out(i, j));
    double sum = 0.0;
    for (int j = 0; j < out.cols; ++j) {
      out(i, j) = std::exp(out(i, j) - mx);
      sum += out(i, j);
    }
    for (int j = 0; j < out.cols; ++j) out(i, j) /= sum;
  }
  Var v = t.make(std::move(out));
  t.set_back(v, [pa = a.id](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    const Mat& y = tp.val(self);
    Mat& ga = tp.grad_mut(pa);
    for (int i = 0; i < g.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < g.cols; ++j) dot += g(i, j) * y(i, j);
      for (int j = 0; j < g.cols; ++j) ga(i, j) += y(i, j) * (g(i, j) - dot);
    }
  });
  return v;
}

Var gather_rows(Var a, std::vector<int> rows) {
  Tape& t = *a.tape;
  Mat out(static_cast<int>(rows.size()), a.cols);
  const Mat& av = t.val(a);
  for (size_t i = 0; i < rows.size(); ++i) {
    assert(rows[i] >= 0 && rows[i] < a.rows);
    for (int j = 0; j < a.cols; ++j) out(static_cast<int>(i), j) = av(rows[i], j);
  }
  Var v = t.make(std::move(out));
  t.set_back(v, [pa = a.id, idx = std::move(rows)](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    Mat& ga = tp.grad_mut(pa);
    for (size_t i = 0; i < idx.size(); ++i) {
      for (int j = 0; j < g.cols; ++j) ga(idx[i], j) += g(static_cast<int>(i), j);
    }
  });
  return v;
}

Var concat_rows(const std::vector<Var>& parts) {
  assert(!parts.empty());
  Tape& t = *parts[0].tape;
  const int cols = parts[0].cols;
  int rows = 0;
  for (const Var& p : parts) {
    assert(p.cols == cols);
    rows += p.rows;
  }
  Mat out(rows, cols);
  int at = 0;
  std::vector<int> ids;
  std::vector<int> offsets;
  for (const Var& p : parts) {
    const Mat& pv = t.val(p);
    for (int i = 0; i < p.rows; ++i) {
      for (int j = 0; j < cols; ++j) out(at + i, j) = pv(i, j);
    }
    ids.push_back(p.id);
    offsets.push_back(at);
    at += p.rows;
  }
  Var v = t.make(std::move(out));
  t.set_back(v, [ids, offsets](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    for (size_t k = 0; k < ids.size(); ++k) {
      Mat& gp = tp.grad_mut(ids[k]);
      for (int i = 0; i < gp.rows; ++i) {
        for (int j = 0; j < gp.cols; ++j) gp(i, j) += g(offsets[k] + i, j);
      }
    }
  });
  return v;
}

Var outer_sum(Var s) {
  Tape& t = *s.tape;
  assert(s.cols == 1);
  const int n = s.rows;
  const Mat& sv = t.val(s);
  Mat out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = sv(i, 0) + sv(j, 0);
  }
  Var v = t.make(std::move(out));
  t.set_back(v, [ps = s.id, n](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    Mat& gs = tp.grad_mut(ps);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += g(i, j) + g(j, i);
      gs(i, 0) += acc;
    }
  });
  return v;
}

Var group_mean(Var a, std::vector<int> group, int n_groups) {
  Tape& t = *a.tape;
  assert(static_cast<int>(group.size()) == a.rows);
  std::vector<int> counts(static_cast<size_t>(n_groups), 0);
  for (int gidx : group) {
    assert(gidx >= 0 && gidx < n_groups);
    ++counts[static_cast<size_t>(gidx)];
  }
  for (int c : counts) {
    if (c == 0) throw ValidationError("group_mean: empty group");
  }
  const Mat& av = t.val(a);
  Mat out(n_groups, a.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) out(group[static_cast<size_t>(i)], j) += av(i, j);
  }
  for (int gidx = 0; gidx < n_groups; ++gidx) {
    for (int j = 0; j < a.cols; ++j) out(gidx, j) /= counts[static_cast<size_t>(gidx)];
  }
  Var v = t.make(std::move(out));
  t.set_back(v, [pa = a.id, grp = std::move(group), counts](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    Mat& ga = tp.grad_mut(pa);
    for (int i = 0; i < ga.rows; ++i) {
      const int gi = grp[static_cast<size_t>(i)];
      const double inv = 1.0 / counts[static_cast<size_t>(gi)];
      for (int j = 0; j < ga.cols; ++j) ga(i, j) += g(gi, j) * inv;
    }
  });
  return v;
}

Var pairwise_dist(Var u, Var c) {
  check_same_tape(u, c);
  Tape& t = *u.tape;
  assert(u.cols == c.cols);
  const Mat& uv = t.val(u);
  const Mat& cv = t.val(c);
  Mat out(u.rows, c.rows);
  for (int i = 0; i < u.rows; ++i) {
    for (int j = 0; j < c.rows; ++j) {
      double s = 0.0;
      for (int k = 0; k < u.cols; ++k) {
        const double d = uv(i, k) - cv(j, k);
        s += d * d;
      }
      out(i, j) = std::sqrt(s);
    }
  }
  Var v = t.make(std::move(out));
  t.set_back(v, [pu = u.id, pc = c.id](Tape& tp, int self) {
    const Mat& g = tp.grad_mut(self);
    const Mat& d = tp.val(self);
    const Mat& uv = tp.val(pu);
    const Mat& cv = tp.val(pc);
    Mat& gu = tp.grad_mut(pu);
    Mat& gc = tp.grad_mut(pc);
    for (int i = 0; i < g.rows; ++i) {
      for (int j = 0; j < g.cols; ++j) {
        // Subgradient 0 at coincident points.
        if (g(i, j) == 0.0 || d(i, j) < 1e-30) continue;
        const double w = g(i, j) / d(i, j);
        for (int k = 0; k < uv.cols; ++k) {
          const double diff = uv(i, k) - cv(j, k);
          gu(i, k) += w * diff;
          gc(j, k) -= w * diff;
        }
      }
    }
  });
  return v;
}

Var nll_of_neg_distance(Var d, std::vector<int> gold) {
  Tape& t = *d.tape;
  assert(static_cast<int>(gold.size()) == d.rows);
  assert(d.rows > 0);
  const Mat& dv = t.val(d);
  const int m = d.rows, n = d.cols;
  // probs(i, j) = softmax_j(-d(i, j)); kept for backward.
  Mat probs(m, n);
  double loss = 0.0;
  for (int i = 0; i < m; ++i) {
    double mn = dv(i, 0);
    for (int j = 1; j < n; ++j) mn = std::min(mn, dv(i, j));
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      probs(i, j) = std::exp(mn - dv(i, j));
      sum += probs(i, j);
    }
    for (int j = 0; j < n; ++j) probs(i, j) /= sum;
    assert(gold[static_cast<size_t>(i)] >= 0 && gold[static_cast<size_t>(i)] < n);
    loss += dv(i, gold[static_cast<size_t>(i)]) - mn + std::log(sum);
  }
  Mat out(1, 1);
  out(0, 0) = loss / m;
  Var v = t.make(std::move(out));
  t.set_back(v, [pd = d.id, gold = std::move(gold), probs = std::move(probs), m](
                    Tape& tp, int self) {
    const double g = tp.grad_mut(self)(0, 0);
    if (g == 0.0) return;
    Mat& gd = tp.grad_mut(pd);
    const double w = g / m;
    for (int i = 0; i < gd.rows; ++i) {
      for (int j = 0; j < gd.cols; ++j) {
        const double delta = j == gold[static_cast<size_t>(i)] ? 1.0 : 0.0;
        gd(i, j) += w * (delta - probs(i, j));
      }
    }
  });
  return v;
}

Var hinge_mean(Var d, double radius) {
  Tape& t = *d.tape;
  const Mat& dv = t.val(d);
  const int m = d.rows, n = d.cols;
  assert(m > 0 && n > 0);
  double loss = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) loss += std::max(0.0, radius - dv(i, j));
  }
  Mat out(1, 1);
  out(0, 0) = loss / (static_cast<double>(m) * n);
  Var v = t.make(std::move(out));
  t.set_back(v, [pd = d.id, radius, m, n](Tape& tp, int self) {
    const double g = tp.grad_mut(self)(0, 0);
    if (g == 0.0) return;
    const Mat& dv = tp.val(pd);
    Mat& gd = tp.grad_mut(pd);
    const double w = g / (static_cast<double>(m) * n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        if (dv(i, j) < radius) gd(i, j) -= w;
      }
    }
  });
  return v;
}

Var weighted_sum(Var a, Mat weights) {
  Tape& t = *a.tape;
  assert(weights.rows == a.rows && weights.cols == a.cols);
  const Mat& av = t.val(a);
  double s = 0.0;
  for (size_t k = 0; k < av.size(); ++k) s += av.a[k] * weights.a[k];
  Mat out(1, 1);
  out(0, 0) = s;
  Var v = t.make(std::move(out));
  t.set_back(v, [pa = a.id, w = std::move(weights)](Tape& tp, int self) {
    const double g = tp.grad_mut(self)(0, 0);
    if (g == 0.0) return;
    Mat& ga = tp.grad_mut(pa);
    for (size_t k = 0; k < ga.size(); ++k) ga.a[k] += g * w.a[k];
  });
  return v;
}

Var boundary_loss(Var scores, const Mat& target) {
  Tape& t = *scores.tape;
  const Mat& f = t.val(scores);
  const int n = f.rows;
  assert(f.rows == f.cols && target.rows == n && target.cols == n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (!std::isfinite(f(i, j))) {
        throw ValidationError("boundary_loss: non-finite score at (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
      }
    }
  }
  // Signed terms s = (-1)^target * f over upper-triangle cells; the implicit
  // "+1" term of log(1 + sum exp) joins the log-sum-exp as exp(0).
  double mx = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double s = target(i, j) > 0.5 ? -f(i, j) : f(i, j);
      mx = std::max(mx, s);
    }
  }
  double denom = std::exp(-mx);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double s = target(i, j) > 0.5 ? -f(i, j) : f(i, j);
      denom += std::exp(s - mx);
    }
  }
  Mat out(1, 1);
  out(0, 0) = mx + std::log(denom);
  Var v = t.make(std::move(out));
  t.set_back(v, [pf = scores.id, tgt = target, mx, denom, n](Tape& tp, int self) {
    const double g = tp.grad_mut(self)(0, 0);
    if (g == 0.0) return;
    const Mat& f = tp.val(pf);
    Mat& gf = tp.grad_mut(pf);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double sign = tgt(i, j) > 0.5 ? -1.0 : 1.0;
        const double s = sign * f(i, j);
        gf(i, j) += g * sign * std::exp(s - mx) / denom;
      }
    }
  });
  return v;
}

}  // namespace spanproto
