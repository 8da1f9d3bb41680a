#include "mgfno/tape.hpp"

#include <stdexcept>

namespace mgfno {

const Shape& data_shape(const NodeData& d) {
  return std::visit([](const auto& t) -> const Shape& { return t.shape(); }, d);
}

NodeData zeros_like(const NodeData& d) {
  if (std::holds_alternative<Tensor>(d)) return Tensor(std::get<Tensor>(d).shape());
  return ComplexTensor(std::get<ComplexTensor>(d).shape());
}

bool is_complex(const NodeData& d) { return std::holds_alternative<ComplexTensor>(d); }

std::size_t Parameter::scalar_count() const {
  if (auto* c = std::get_if<ComplexTensor>(&value)) return 2 * c->size();
  return std::get<Tensor>(value).size();
}

Tape& Var::tape() const {
  if (!tape_) throw std::logic_error("use of an unbound Var");
  return *tape_;
}

const NodeData& Var::data() const { return tape().value(index_); }

const Tensor& Var::real() const {
  const auto* t = std::get_if<Tensor>(&data());
  if (!t) throw std::invalid_argument("expected a real node, found a complex one");
  return *t;
}

const ComplexTensor& Var::cplx() const {
  const auto* t = std::get_if<ComplexTensor>(&data());
  if (!t) throw std::invalid_argument("expected a complex node, found a real one");
  return *t;
}

bool Var::is_complex() const { return mgfno::is_complex(data()); }
const Shape& Var::shape() const { return data_shape(data()); }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor x) { return push(Node{std::move(x), std::nullopt, {}, false}); }
Var Tape::constant(ComplexTensor x) { return push(Node{std::move(x), std::nullopt, {}, false}); }

Var Tape::param(const Parameter& p) {
  if (!gradients_enabled_) return push(Node{p.value, std::nullopt, {}, false});
  if (auto it = param_index_.find(&p); it != param_index_.end()) {
    return Var(this, param_nodes_[it->second]);
  }
  Var v = push(Node{p.value, std::nullopt, {}, true});
  param_index_.emplace(&p, param_nodes_.size());
  param_nodes_.push_back(v.index());
  return v;
}

Var Tape::record(NodeData value, std::initializer_list<Var> inputs, Adjoint adjoint) {
  bool needs = false;
  for (const Var& in : inputs) {
    if (!in.valid()) continue;
    if (&in.tape() != this) throw std::invalid_argument("primitive inputs live on different tapes");
    needs = needs || nodes_[in.index()].requires_grad;
  }
  if (backward_done_) throw std::logic_error("cannot record on a tape after backward");
  return push(Node{std::move(value), std::nullopt, needs ? std::move(adjoint) : Adjoint{}, needs});
}

bool Tape::requires_grad(Var v) const { return v.valid() && nodes_.at(v.index()).requires_grad; }

Tensor& Tape::grad_buffer_real(Var v) {
  Node& n = nodes_.at(v.index());
  if (!n.grad) n.grad = zeros_like(n.value);
  auto* g = std::get_if<Tensor>(&*n.grad);
  if (!g) throw std::logic_error("real gradient requested for a complex node");
  return *g;
}

ComplexTensor& Tape::grad_buffer_complex(Var v) {
  Node& n = nodes_.at(v.index());
  if (!n.grad) n.grad = zeros_like(n.value);
  auto* g = std::get_if<ComplexTensor>(&*n.grad);
  if (!g) throw std::logic_error("complex gradient requested for a real node");
  return *g;
}

void Tape::accumulate(Var v, const Tensor& g) {
  if (!requires_grad(v)) return;
  grad_buffer_real(v) += g;
}

void Tape::accumulate(Var v, const ComplexTensor& g) {
  if (!requires_grad(v)) return;
  grad_buffer_complex(v) += g;
}

void Tape::backward(Var loss) {
  if (backward_done_) throw std::logic_error("backward already ran on this tape");
  if (&loss.tape() != this) throw std::invalid_argument("loss node belongs to another tape");
  const Node& ln = nodes_.at(loss.index());
  const auto* lt = std::get_if<Tensor>(&ln.value);
  if (!lt || lt->size() != 1) {
    throw std::invalid_argument("backward needs a real scalar loss, got shape " +
                                shape_string(data_shape(ln.value)));
  }
  backward_done_ = true;
  if (!ln.requires_grad) return;
  nodes_[loss.index()].grad = Tensor(lt->shape(), 1.0);
  for (std::size_t i = loss.index() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.grad || !n.adjoint) continue;
    // Copy: the adjoint may grow nodes_ only if misused, but keep the value stable.
    const NodeData g = *n.grad;
    n.adjoint(*this, g);
  }
}

NodeData Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.index());
  if (n.grad) return *n.grad;
  return zeros_like(n.value);
}

NodeData Tape::gradient(const Parameter& p) const {
  auto it = param_index_.find(&p);
  if (it == param_index_.end()) return zeros_like(p.value);
  const Node& n = nodes_[param_nodes_[it->second]];
  return n.grad ? *n.grad : zeros_like(n.value);
}

std::map<std::size_t, NodeData> Tape::gradients() const {
  std::map<std::size_t, NodeData> out;
  for (std::size_t id = 0; id < param_nodes_.size(); ++id) {
    const Node& n = nodes_[param_nodes_[id]];
    out.emplace(id, n.grad ? *n.grad : zeros_like(n.value));
  }
  return out;
}

std::size_t Tape::parameter_id(const Parameter& p) const {
  auto it = param_index_.find(&p);
  if (it == param_index_.end()) throw std::out_of_range("parameter '" + p.name + "' not registered");
  return it->second;
}

}  // namespace mgfno
