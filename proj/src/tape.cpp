#include "ltn/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ltn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

Tensor& ensure_grad(std::vector<Tensor>& grads, NodeId id, const Tensor& like) {
  if (grads[id].data.empty()) grads[id] = Tensor::zeros_like(like);
  return grads[id];
}

}  // namespace

NodeId Tape::push(Op op, std::vector<NodeId> inputs, Tensor value, double aux) {
  Node n;
  n.op = op;
  n.inputs = std::move(inputs);
  n.value = std::move(value);
  n.aux = aux;
  n.on_param_path = (op == Op::parameter);
  for (NodeId in : n.inputs) {
    require(in < nodes_.size(), "tape: input node out of range");
    n.on_param_path = n.on_param_path || nodes_[in].on_param_path;
  }
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::input(Tensor value) { return push(Op::input, {}, std::move(value)); }

NodeId Tape::parameter(Tensor value) {
  NodeId id = push(Op::parameter, {}, std::move(value));
  parameters_.push_back(id);
  return id;
}

NodeId Tape::add(NodeId a, NodeId b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), "add: shape mismatch " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out = ta;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += tb.data[i];
  return push(Op::add, {a, b}, std::move(out));
}

NodeId Tape::sub(NodeId a, NodeId b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), "sub: shape mismatch " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out = ta;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= tb.data[i];
  return push(Op::sub, {a, b}, std::move(out));
}

NodeId Tape::mul(NodeId a, NodeId b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), "mul: shape mismatch " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out = ta;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= tb.data[i];
  return push(Op::mul, {a, b}, std::move(out));
}

NodeId Tape::scalar_mul(double c, NodeId a) {
  Tensor out = value(a);
  for (double& v : out.data) v *= c;
  return push(Op::scalar_mul, {a}, std::move(out), c);
}

NodeId Tape::matvec(NodeId m, NodeId v) {
  const Tensor& tm = value(m);
  const Tensor& tv = value(v);
  require(tm.rank() == 2, "matvec: matrix must have rank 2, got " + tm.shape_str());
  require(tv.rank() == 1 && tv.shape[0] == tm.shape[1],
          "matvec: shape mismatch " + tm.shape_str() + " vs " + tv.shape_str());
  const std::size_t rows = tm.shape[0], cols = tm.shape[1];
  Tensor out({rows});
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    const double* row = tm.data.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * tv.data[j];
    out.data[i] = acc;
  }
  return push(Op::matvec, {m, v}, std::move(out));
}

NodeId Tape::concat(const std::vector<NodeId>& parts) {
  require(!parts.empty(), "concat: no inputs");
  std::size_t total = 0;
  for (NodeId p : parts) {
    require(value(p).rank() == 1, "concat: rank-1 inputs required");
    total += value(p).shape[0];
  }
  Tensor out({total});
  std::size_t at = 0;
  for (NodeId p : parts) {
    const Tensor& t = value(p);
    std::copy(t.data.begin(), t.data.end(), out.data.begin() + at);
    at += t.data.size();
  }
  return push(Op::concat, parts, std::move(out));
}

NodeId Tape::bilinear(NodeId left, NodeId w, NodeId right) {
  const Tensor& tl = value(left);
  const Tensor& tw = value(w);
  const Tensor& tr = value(right);
  require(tl.rank() == 1 && tr.rank() == 1 && tw.rank() == 3,
          "bilinear: expected (d), (d,d,k), (d)");
  const std::size_t d = tl.shape[0], k = tw.shape[2];
  require(tw.shape[0] == d && tw.shape[1] == d && tr.shape[0] == d,
          "bilinear: shape mismatch " + tw.shape_str() + " for d=" + std::to_string(d));
  Tensor out({k});
  // out[i] = sum_{p,q} left[p] * w[p,q,i] * right[q]; the k axis is contiguous.
  for (std::size_t p = 0; p < d; ++p) {
    const double lp = tl.data[p];
    for (std::size_t q = 0; q < d; ++q) {
      const double c = lp * tr.data[q];
      const double* slab = tw.data.data() + (p * d + q) * k;
      for (std::size_t i = 0; i < k; ++i) out.data[i] += c * slab[i];
    }
  }
  return push(Op::bilinear, {left, w, right}, std::move(out));
}

NodeId Tape::tanh(NodeId a) {
  Tensor out = value(a);
  for (double& v : out.data) v = std::tanh(v);
  return push(Op::tanh_, {a}, std::move(out));
}

NodeId Tape::sigmoid(NodeId a) {
  Tensor out = value(a);
  for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
  return push(Op::sigmoid_, {a}, std::move(out));
}

NodeId Tape::one_minus(NodeId a) {
  Tensor out = value(a);
  for (double& v : out.data) v = 1.0 - v;
  return push(Op::one_minus, {a}, std::move(out));
}

NodeId Tape::min_clamp1(NodeId a) {
  Tensor out = value(a);
  for (double& v : out.data) v = v < 1.0 ? v : 1.0;
  return push(Op::min_clamp1, {a}, std::move(out));
}

NodeId Tape::max(NodeId a, NodeId b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), "max: shape mismatch " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out = ta;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = ta.data[i] >= tb.data[i] ? ta.data[i] : tb.data[i];
  return push(Op::max_, {a, b}, std::move(out));
}

NodeId Tape::abs(NodeId a) {
  Tensor out = value(a);
  for (double& v : out.data) v = std::fabs(v);
  return push(Op::abs_, {a}, std::move(out));
}

NodeId Tape::sum(NodeId a) {
  const Tensor& ta = value(a);
  require(ta.numel() > 0, "sum: empty input");
  double acc = 0.0;
  for (double v : ta.data) acc += v;
  return push(Op::sum_, {a}, Tensor::scalar(acc));
}

NodeId Tape::harmonic_mean_eps(const std::vector<NodeId>& xs, double eps) {
  require(!xs.empty(), "harmonic_mean_eps: empty input");
  double denom = 0.0;
  for (NodeId x : xs) {
    require(value(x).is_scalar(), "harmonic_mean_eps: scalar inputs required");
    denom += 1.0 / (value(x).item() + eps);
  }
  const double n = static_cast<double>(xs.size());
  return push(Op::harmonic_mean, xs, Tensor::scalar(n / denom), eps);
}

void Tape::backward_into(const Node& n, const Tensor& g, std::vector<Tensor>& grads) const {
  switch (n.op) {
    case Op::input:
    case Op::parameter:
      return;
    case Op::add: {
      Tensor& ga = ensure_grad(grads, n.inputs[0], n.value);
      Tensor& gb = ensure_grad(grads, n.inputs[1], n.value);
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        ga.data[i] += g.data[i];
        gb.data[i] += g.data[i];
      }
      return;
    }
    case Op::sub: {
      Tensor& ga = ensure_grad(grads, n.inputs[0], n.value);
      Tensor& gb = ensure_grad(grads, n.inputs[1], n.value);
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        ga.data[i] += g.data[i];
        gb.data[i] -= g.data[i];
      }
      return;
    }
    case Op::mul: {
      const Tensor& a = node(n.inputs[0]).value;
      const Tensor& b = node(n.inputs[1]).value;
      Tensor& ga = ensure_grad(grads, n.inputs[0], a);
      Tensor& gb = ensure_grad(grads, n.inputs[1], b);
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        ga.data[i] += g.data[i] * b.data[i];
        gb.data[i] += g.data[i] * a.data[i];
      }
      return;
    }
    case Op::scalar_mul: {
      Tensor& ga = ensure_grad(grads, n.inputs[0], n.value);
      for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += n.aux * g.data[i];
      return;
    }
    case Op::matvec: {
      const Tensor& m = node(n.inputs[0]).value;
      const Tensor& v = node(n.inputs[1]).value;
      Tensor& gm = ensure_grad(grads, n.inputs[0], m);
      Tensor& gv = ensure_grad(grads, n.inputs[1], v);
      const std::size_t rows = m.shape[0], cols = m.shape[1];
      for (std::size_t i = 0; i < rows; ++i) {
        const double gi = g.data[i];
        if (gi == 0.0) continue;
        double* gm_row = gm.data.data() + i * cols;
        const double* m_row = m.data.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) {
          gm_row[j] += gi * v.data[j];
          gv.data[j] += gi * m_row[j];
        }
      }
      return;
    }
    case Op::concat: {
      std::size_t at = 0;
      for (NodeId p : n.inputs) {
        const Tensor& part = node(p).value;
        Tensor& gp = ensure_grad(grads, p, part);
        for (std::size_t i = 0; i < part.data.size(); ++i) gp.data[i] += g.data[at + i];
        at += part.data.size();
      }
      return;
    }
    case Op::bilinear: {
      const Tensor& l = node(n.inputs[0]).value;
      const Tensor& w = node(n.inputs[1]).value;
      const Tensor& r = node(n.inputs[2]).value;
      Tensor& gl = ensure_grad(grads, n.inputs[0], l);
      Tensor& gw = ensure_grad(grads, n.inputs[1], w);
      Tensor& gr = ensure_grad(grads, n.inputs[2], r);
      const std::size_t d = l.shape[0], k = w.shape[2];
      for (std::size_t p = 0; p < d; ++p) {
        const double lp = l.data[p];
        for (std::size_t q = 0; q < d; ++q) {
          const std::size_t base = (p * d + q) * k;
          const double* slab = w.data.data() + base;
          double* gslab = gw.data.data() + base;
          double s = 0.0;  // sum_i w[p,q,i] g[i]
          const double c = lp * r.data[q];
          for (std::size_t i = 0; i < k; ++i) {
            s += slab[i] * g.data[i];
            gslab[i] += c * g.data[i];
          }
          gl.data[p] += s * r.data[q];
          gr.data[q] += s * lp;
        }
      }
      return;
    }
    case Op::tanh_: {
      Tensor& ga = ensure_grad(grads, n.inputs[0], n.value);
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        const double y = n.value.data[i];
        ga.data[i] += g.data[i] * (1.0 - y * y);
      }
      return;
    }
    case Op::sigmoid_: {
      Tensor& ga = ensure_grad(grads, n.inputs[0], n.value);
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        const double y = n.value.data[i];
        ga.data[i] += g.data[i] * y * (1.0 - y);
      }
      return;
    }
    case Op::one_minus: {
      Tensor& ga = ensure_grad(grads, n.inputs[0], n.value);
      for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] -= g.data[i];
      return;
    }
    case Op::min_clamp1: {
      const Tensor& a = node(n.inputs[0]).value;
      Tensor& ga = ensure_grad(grads, n.inputs[0], a);
      for (std::size_t i = 0; i < g.data.size(); ++i)
        if (a.data[i] <= 1.0) ga.data[i] += g.data[i];
      return;
    }
    case Op::max_: {
      const Tensor& a = node(n.inputs[0]).value;
      const Tensor& b = node(n.inputs[1]).value;
      Tensor& ga = ensure_grad(grads, n.inputs[0], a);
      Tensor& gb = ensure_grad(grads, n.inputs[1], b);
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        if (a.data[i] >= b.data[i])
          ga.data[i] += g.data[i];
        else
          gb.data[i] += g.data[i];
      }
      return;
    }
    case Op::abs_: {
      const Tensor& a = node(n.inputs[0]).value;
      Tensor& ga = ensure_grad(grads, n.inputs[0], a);
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        if (a.data[i] > 0.0)
          ga.data[i] += g.data[i];
        else if (a.data[i] < 0.0)
          ga.data[i] -= g.data[i];
      }
      return;
    }
    case Op::sum_: {
      const Tensor& a = node(n.inputs[0]).value;
      Tensor& ga = ensure_grad(grads, n.inputs[0], a);
      const double gs = g.item();
      for (double& v : ga.data) v += gs;
      return;
    }
    case Op::harmonic_mean: {
      // h = N / S with S = sum 1/(x_i + eps); dh/dx_j = (N / S^2) / (x_j + eps)^2
      const double eps = n.aux;
      double s = 0.0;
      for (NodeId x : n.inputs) s += 1.0 / (node(x).value.item() + eps);
      const double gs = g.item();
      const double n_over_s2 = static_cast<double>(n.inputs.size()) / (s * s);
      for (NodeId x : n.inputs) {
        Tensor& gx = ensure_grad(grads, x, node(x).value);
        const double xe = node(x).value.item() + eps;
        gx.data[0] += gs * n_over_s2 / (xe * xe);
      }
      return;
    }
  }
}

std::map<NodeId, Tensor> Tape::gradients(NodeId loss) const {
  if (loss >= nodes_.size()) throw std::invalid_argument("gradients: unknown loss node");
  if (!nodes_[loss].value.is_scalar())
    throw std::invalid_argument("gradients: loss must be scalar, got " +
                                nodes_[loss].value.shape_str());

  std::vector<Tensor> grads(nodes_.size());
  grads[loss] = Tensor::scalar(1.0);
  for (NodeId id = loss + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!n.on_param_path) continue;           // cannot reach any parameter
    if (grads[id].data.empty()) continue;     // loss does not reach this node
    backward_into(n, grads[id], grads);
  }

  std::map<NodeId, Tensor> out;
  for (NodeId p : parameters_) {
    if (grads[p].data.empty())
      out.emplace(p, Tensor::zeros_like(nodes_[p].value));
    else
      out.emplace(p, std::move(grads[p]));
  }
  return out;
}

}  // namespace ltn
