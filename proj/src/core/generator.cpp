#include "invman/core/generator.hpp"

#include "invman/core/errors.hpp"

namespace invman {

Nonlinearity zero_nonlinearity(int dim) {
  return Nonlinearity{[dim](double, const Vec&) { return Vec::Zero(dim).eval(); }, 0.0, true};
}

namespace {

void check_zero_at_origin(int dim, const Nonlinearity& f) {
  if (!f.eval) throw InvalidArgument("nonlinearity has no evaluator");
  if (!(f.lipschitz >= 0.0)) throw InvalidArgument("declared Lipschitz constant must be >= 0");
  if (!f.zero_at_origin) return;
  const Vec zero = Vec::Zero(dim);
  for (double t : {0.0, 1.0, -1.0}) {
    Vec v;
    try {
      v = f.eval(t, zero);
    } catch (const OutOfDomain&) {
      continue;
    }
    if (v.size() != dim) throw InvalidArgument("nonlinearity returns wrong dimension");
    if (v.norm() > 1e-12) throw InvalidArgument("nonlinearity flagged f(t,0)=0 but is nonzero at 0");
  }
}

}  // namespace

Generator::Generator(int dim, LinearPart a, std::optional<Nonlinearity> f)
    : dim_(dim), a_(std::move(a)), f_(std::move(f)) {
  if (dim < 1) throw InvalidArgument("generator dimension must be positive");
  if (!a_) throw InvalidArgument("generator needs a linear part");
  Mat probe;
  try {
    probe = a_(0.0);
  } catch (const OutOfDomain&) {
    probe = Mat::Zero(dim, dim);
  }
  if (probe.rows() != dim || probe.cols() != dim) throw InvalidArgument("A(t) has wrong shape");
  if (f_) check_zero_at_origin(dim, *f_);
}

Generator Generator::autonomous(const Mat& a, std::optional<Nonlinearity> f) {
  if (a.rows() != a.cols()) throw InvalidArgument("A must be square");
  if (!a.allFinite()) throw InvalidArgument("A has non-finite entries");
  Mat copy = a;
  Generator g(static_cast<int>(a.rows()), [copy](double) { return copy; }, std::move(f));
  g.constant_ = a;
  return g;
}

Mat Generator::linear(double t) const {
  if (constant_) return *constant_;
  return a_(t);
}

Vec Generator::apply_linear(double t, const Vec& u) const {
  if (constant_) return *constant_ * u;
  return a_(t) * u;
}

const Nonlinearity& Generator::nonlinearity() const {
  if (!f_) throw PreconditionFailure("generator has no nonlinearity");
  return *f_;
}

Vec Generator::field(double t, const Vec& u) const {
  Vec out = apply_linear(t, u);
  if (f_) out += f_->eval(t, u);
  return out;
}

Generator Generator::linear_only() const {
  Generator g = *this;
  g.f_.reset();
  return g;
}

Generator Generator::with_nonlinearity(Nonlinearity f) const {
  check_zero_at_origin(dim_, f);
  Generator g = *this;
  g.f_ = std::move(f);
  return g;
}

Generator Generator::shifted(double shift) const {
  if (constant_) return autonomous(*constant_ + shift * Mat::Identity(dim_, dim_), f_);
  LinearPart a = a_;
  const int d = dim_;
  return Generator(d, [a, shift, d](double t) { return (a(t) + shift * Mat::Identity(d, d)).eval(); }, f_);
}

Generator Generator::perturbed(LinearPart b) const {
  LinearPart a = a_;
  return Generator(dim_, [a, b](double t) { return (a(t) + b(t)).eval(); }, f_);
}

Generator Generator::perturbed(const Mat& b) const {
  if (constant_) return autonomous(*constant_ + b, f_);
  return perturbed([b](double) { return b; });
}

}  // namespace invman
