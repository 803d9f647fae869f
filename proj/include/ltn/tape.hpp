#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ltn/tensor.hpp"

namespace ltn {

using NodeId = std::uint32_t;

// Reverse-mode tape. Forward ops are recorded as they run; gradients() then
// walks the record backwards and returns d(loss)/d(p) for every registered
// parameter. A tape is single-owner while recording; values read out of it
// are plain Tensors and may be shared freely.
//
// Subgradient conventions at non-smooth points: max and min_clamp1 send the
// gradient to the first attaining argument, abs at 0 propagates 0.
class Tape {
 public:
  static constexpr double kHarmonicEps = 1e-6;

  // Leaves. input() is constant with respect to differentiation;
  // parameter() registers a gradient target.
  NodeId input(Tensor value);
  NodeId parameter(Tensor value);
  NodeId scalar_input(double v) { return input(Tensor::scalar(v)); }

  // Primitives. Shapes are validated; mismatches throw std::invalid_argument.
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);  // elementwise
  NodeId scalar_mul(double c, NodeId a);
  NodeId matvec(NodeId m, NodeId v);                   // (r,c) x (c) -> (r)
  NodeId concat(const std::vector<NodeId>& parts);     // rank-1 only
  NodeId bilinear(NodeId left, NodeId w, NodeId right);  // (d),(d,d,k),(d) -> (k)
  NodeId tanh(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId one_minus(NodeId a);
  NodeId min_clamp1(NodeId a);  // elementwise min(x, 1)
  NodeId max(NodeId a, NodeId b);
  NodeId abs(NodeId a);
  NodeId sum(NodeId a);  // reduce all elements -> scalar
  NodeId harmonic_mean_eps(const std::vector<NodeId>& xs, double eps = kHarmonicEps);

  NodeId dot(NodeId a, NodeId b) { return sum(mul(a, b)); }

  const Tensor& value(NodeId id) const { return nodes_.at(id).value; }
  // True when any parameter feeds this node.
  bool depends_on_parameters(NodeId id) const { return nodes_.at(id).on_param_path; }
  const std::vector<NodeId>& parameters() const { return parameters_; }
  std::size_t size() const { return nodes_.size(); }

  // d(loss)/d(p) for every registered parameter. Parameters the loss does not
  // reach get zero tensors. Throws if loss is not scalar.
  std::map<NodeId, Tensor> gradients(NodeId loss) const;

 private:
  enum class Op : std::uint8_t {
    input, parameter, add, sub, mul, scalar_mul, matvec, concat, bilinear,
    tanh_, sigmoid_, one_minus, min_clamp1, max_, abs_, sum_, harmonic_mean,
  };

  struct Node {
    Op op;
    std::vector<NodeId> inputs;
    Tensor value;
    double aux = 0.0;  // scalar_mul coefficient / harmonic-mean epsilon
    bool on_param_path = false;
  };

  NodeId push(Op op, std::vector<NodeId> inputs, Tensor value, double aux = 0.0);
  const Node& node(NodeId id) const { return nodes_.at(id); }
  void backward_into(const Node& n, const Tensor& grad_out,
                     std::vector<Tensor>& grads) const;

  std::vector<Node> nodes_;
  std::vector<NodeId> parameters_;
};

}  // namespace ltn
