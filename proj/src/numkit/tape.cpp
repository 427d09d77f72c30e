#include "spectran/numkit/tape.hpp"

#include <cmath>

#include "spectran/errors.hpp"

namespace spectran::numkit {

namespace {
void require(bool ok, const std::string& msg) {
  if (!ok) throw DimensionError(msg);
}
}  // namespace

Tape::Id Tape::constant(Matrix v) { return push(std::move(v)); }

Tape::Id Tape::param(ParamStore& store, const std::string& name) {
  const int idx = store.index_of(name);
  Id id = push(store.entry(idx).value);
  nodes_[static_cast<std::size_t>(id)].store = &store;
  nodes_[static_cast<std::size_t>(id)].store_index = idx;
  return id;
}

Tape::Id Tape::matmul(Id a, Id b) {
  Id out = push(numkit::matmul(v(a), v(b)));
  nodes_.back().back = [this, a, b, out] {
    add_into(g(a), numkit::matmul_nt(g(out), v(b)));
    add_into(g(b), numkit::matmul_tn(v(a), g(out)));
  };
  return out;
}

Tape::Id Tape::matmul_nt(Id a, Id b) {
  Id out = push(numkit::matmul_nt(v(a), v(b)));
  nodes_.back().back = [this, a, b, out] {
    add_into(g(a), numkit::matmul(g(out), v(b)));
    add_into(g(b), numkit::matmul_tn(g(out), v(a)));
  };
  return out;
}

Tape::Id Tape::add(Id a, Id b) {
  Id out = push(numkit::add(v(a), v(b)));
  nodes_.back().back = [this, a, b, out] {
    add_into(g(a), g(out));
    add_into(g(b), g(out));
  };
  return out;
}

Tape::Id Tape::sub(Id a, Id b) {
  Id out = push(numkit::sub(v(a), v(b)));
  nodes_.back().back = [this, a, b, out] {
    add_into(g(a), g(out));
    axpy_into(g(b), -1.0, g(out));
  };
  return out;
}

Tape::Id Tape::scale(Id a, double s) {
  Id out = push(numkit::scale(v(a), s));
  nodes_.back().back = [this, a, out, s] { axpy_into(g(a), s, g(out)); };
  return out;
}

Tape::Id Tape::relu(Id a) {
  Matrix y = v(a);
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y.data()[i] < 0.0) y.data()[i] = 0.0;
  Id out = push(std::move(y));
  nodes_.back().back = [this, a, out] {
    Matrix& ga = g(a);
    const Matrix& x = v(a);
    const Matrix& go = g(out);
    for (std::size_t i = 0; i < ga.size(); ++i)
      if (x.data()[i] > 0.0) ga.data()[i] += go.data()[i];
  };
  return out;
}

Tape::Id Tape::tanh_act(Id a) {
  Matrix y = v(a);
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = std::tanh(y.data()[i]);
  Id out = push(std::move(y));
  nodes_.back().back = [this, a, out] {
    Matrix& ga = g(a);
    const Matrix& y2 = v(out);
    const Matrix& go = g(out);
    for (std::size_t i = 0; i < ga.size(); ++i)
      ga.data()[i] += go.data()[i] * (1.0 - y2.data()[i] * y2.data()[i]);
  };
  return out;
}

Tape::Id Tape::softshrink(Id x, Id lambda) {
  require(v(lambda).rows() == 1 && v(lambda).cols() == 1, "softshrink: lambda must be 1x1");
  const double lam = v(lambda)(0, 0);
  if (lam < 0.0) throw ContractError("softshrink: lambda must be >= 0");
  Id out = push(numkit::softshrink(v(x), lam));
  nodes_.back().back = [this, x, lambda, out, lam] {
    Matrix& gx = g(x);
    Matrix& gl = g(lambda);
    const Matrix& xv = v(x);
    const Matrix& go = g(out);
    double dl = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double xi = xv.data()[i];
      if (xi > lam) {
        gx.data()[i] += go.data()[i];
        dl -= go.data()[i];
      } else if (xi < -lam) {
        gx.data()[i] += go.data()[i];
        dl += go.data()[i];
      }
    }
    gl(0, 0) += dl;
  };
  return out;
}

Tape::Id Tape::abs_scalar(Id a) {
  require(v(a).rows() == 1 && v(a).cols() == 1, "abs_scalar: input must be 1x1");
  Matrix y(1, 1, std::abs(v(a)(0, 0)));
  Id out = push(std::move(y));
  nodes_.back().back = [this, a, out] {
    const double x = v(a)(0, 0);
    const double s = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    g(a)(0, 0) += s * g(out)(0, 0);
  };
  return out;
}

Tape::Id Tape::taylor_weights(Id alpha, const std::vector<double>& sigma, int d) {
  require(v(alpha).rows() == 1, "taylor_weights: alpha must be a row vector");
  if (d < 1 || static_cast<std::size_t>(d) > sigma.size())
    throw DimensionError("taylor_weights: d out of range");
  const double s1 = sigma[0];
  if (!(s1 > 0.0)) throw NumericError("taylor_weights: leading singular value must be > 0");
  const int n_terms = static_cast<int>(v(alpha).cols());
  // powers[i*n_terms + k] = (sigma_i / sigma_1)^k
  std::vector<double> powers(static_cast<std::size_t>(d) * n_terms);
  for (int i = 0; i < d; ++i) {
    const double sbar = sigma[static_cast<std::size_t>(i)] / s1;
    double p = 1.0;
    for (int k = 0; k < n_terms; ++k) {
      powers[static_cast<std::size_t>(i) * n_terms + k] = p;
      p *= sbar;
    }
  }
  Matrix w(1, static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    double acc = 0.0;
    for (int k = 0; k < n_terms; ++k)
      acc += v(alpha)(0, static_cast<std::size_t>(k)) *
             powers[static_cast<std::size_t>(i) * n_terms + k];
    w(0, static_cast<std::size_t>(i)) = s1 * acc;
  }
  Id out = push(std::move(w));
  nodes_.back().back = [this, alpha, out, powers, d, n_terms, s1] {
    Matrix& ga = g(alpha);
    const Matrix& go = g(out);
    for (int k = 0; k < n_terms; ++k) {
      double acc = 0.0;
      for (int i = 0; i < d; ++i)
        acc += go(0, static_cast<std::size_t>(i)) *
               powers[static_cast<std::size_t>(i) * n_terms + k];
      ga(0, static_cast<std::size_t>(k)) += s1 * acc;
    }
  };
  return out;
}

Tape::Id Tape::diag_block(Id w, int r) {
  require(v(w).rows() == 1, "diag_block: weights must be a row vector");
  const std::size_t d = v(w).cols();
  if (static_cast<std::size_t>(r) < d) throw DimensionError("diag_block: r must be >= d");
  Matrix a(d, static_cast<std::size_t>(r));
  for (std::size_t i = 0; i < d; ++i) a(i, i) = v(w)(0, i);
  Id out = push(std::move(a));
  nodes_.back().back = [this, w, out, d] {
    for (std::size_t i = 0; i < d; ++i) g(w)(0, i) += g(out)(i, i);
  };
  return out;
}

Tape::Id Tape::gather_rows(Id table, const std::vector<int>& ids, int pad_id) {
  const Matrix& t = v(table);
  for (int id : ids)
    if (id != pad_id && (id < 0 || static_cast<std::size_t>(id) >= t.rows()))
      throw ContractError("gather_rows: id out of range: " + std::to_string(id));
  Matrix out(ids.size(), t.cols());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] == pad_id) continue;
    const double* src = t.row(static_cast<std::size_t>(ids[k]));
    double* dst = out.row(k);
    for (std::size_t j = 0; j < t.cols(); ++j) dst[j] = src[j];
  }
  Id o = push(std::move(out));
  nodes_.back().back = [this, table, o, ids, pad_id] {
    Matrix& gt = g(table);
    const Matrix& go = g(o);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (ids[k] == pad_id) continue;
      double* dst = gt.row(static_cast<std::size_t>(ids[k]));
      const double* src = go.row(k);
      for (std::size_t j = 0; j < gt.cols(); ++j) dst[j] += src[j];
    }
  };
  return o;
}

Tape::Id Tape::tile_rows(Id a, int times) {
  const Matrix& x = v(a);
  Matrix out(x.rows() * static_cast<std::size_t>(times), x.cols());
  for (int c = 0; c < times; ++c)
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double* dst = out.row(static_cast<std::size_t>(c) * x.rows() + i);
      const double* src = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = src[j];
    }
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, o, times] {
    Matrix& ga = g(a);
    const Matrix& go = g(o);
    for (int c = 0; c < times; ++c)
      for (std::size_t i = 0; i < ga.rows(); ++i) {
        double* dst = ga.row(i);
        const double* src = go.row(static_cast<std::size_t>(c) * ga.rows() + i);
        for (std::size_t j = 0; j < ga.cols(); ++j) dst[j] += src[j];
      }
  };
  return o;
}

Tape::Id Tape::repeat_rows(Id a, int times) {
  const Matrix& x = v(a);
  Matrix out(x.rows() * static_cast<std::size_t>(times), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (int c = 0; c < times; ++c) {
      double* dst = out.row(i * static_cast<std::size_t>(times) + static_cast<std::size_t>(c));
      const double* src = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = src[j];
    }
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, o, times] {
    Matrix& ga = g(a);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.rows(); ++i)
      for (int c = 0; c < times; ++c) {
        double* dst = ga.row(i);
        const double* src =
            go.row(i * static_cast<std::size_t>(times) + static_cast<std::size_t>(c));
        for (std::size_t j = 0; j < ga.cols(); ++j) dst[j] += src[j];
      }
  };
  return o;
}

Tape::Id Tape::reshape(Id a, std::size_t rows, std::size_t cols) {
  require(v(a).size() == rows * cols, "reshape: element count mismatch");
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = v(a).data()[i];
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, o] {
    Matrix& ga = g(a);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += go.data()[i];
  };
  return o;
}

Tape::Id Tape::concat_cols(Id a, Id b) {
  const Matrix& x = v(a);
  const Matrix& y = v(b);
  require(x.rows() == y.rows(), "concat_cols: row count mismatch");
  Matrix out(x.rows(), x.cols() + y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* dst = out.row(i);
    const double* xs = x.row(i);
    const double* ys = y.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = xs[j];
    for (std::size_t j = 0; j < y.cols(); ++j) dst[x.cols() + j] = ys[j];
  }
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, b, o] {
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.rows(); ++i) {
      const double* src = go.row(i);
      double* xs = ga.row(i);
      double* ys = gb.row(i);
      for (std::size_t j = 0; j < ga.cols(); ++j) xs[j] += src[j];
      for (std::size_t j = 0; j < gb.cols(); ++j) ys[j] += src[ga.cols() + j];
    }
  };
  return o;
}

Tape::Id Tape::slice_cols(Id a, std::size_t start, std::size_t len) {
  const Matrix& x = v(a);
  require(start + len <= x.cols(), "slice_cols: range out of bounds");
  Matrix out(x.rows(), len);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < len; ++j) out(i, j) = x(i, start + j);
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, o, start, len] {
    Matrix& ga = g(a);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.rows(); ++i)
      for (std::size_t j = 0; j < len; ++j) ga(i, start + j) += go(i, j);
  };
  return o;
}

Tape::Id Tape::mul_mask(Id a, Matrix mask) {
  const Matrix& x = v(a);
  const bool col_broadcast = mask.cols() == 1 && x.cols() != 1;
  require(mask.rows() == x.rows() && (col_broadcast || mask.cols() == x.cols()),
          "mul_mask: mask shape mismatch");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      out(i, j) = x(i, j) * (col_broadcast ? mask(i, 0) : mask(i, j));
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, o, mask = std::move(mask), col_broadcast] {
    Matrix& ga = g(a);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.rows(); ++i)
      for (std::size_t j = 0; j < ga.cols(); ++j)
        ga(i, j) += go(i, j) * (col_broadcast ? mask(i, 0) : mask(i, j));
  };
  return o;
}

Tape::Id Tape::masked_softmax_rows(Id a, Matrix mask) {
  const Matrix& x = v(a);
  require(mask.same_shape(x), "masked_softmax_rows: mask shape mismatch");
  Matrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double mx = -1e300;
    bool any = false;
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (mask(i, j) != 0.0) {
        any = true;
        mx = std::max(mx, x(i, j));
      }
    if (!any) continue;  // row stays zero
    double denom = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (mask(i, j) != 0.0) {
        y(i, j) = std::exp(x(i, j) - mx);
        denom += y(i, j);
      }
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (mask(i, j) != 0.0) y(i, j) /= denom;
  }
  Id o = push(std::move(y));
  nodes_.back().back = [this, a, o, mask = std::move(mask)] {
    Matrix& ga = g(a);
    const Matrix& yv = v(o);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < ga.cols(); ++j)
        if (mask(i, j) != 0.0) dot += go(i, j) * yv(i, j);
      for (std::size_t j = 0; j < ga.cols(); ++j)
        if (mask(i, j) != 0.0) ga(i, j) += yv(i, j) * (go(i, j) - dot);
    }
  };
  return o;
}

Tape::Id Tape::layer_norm_rows(Id a, double eps) {
  const Matrix& x = v(a);
  require(x.cols() >= 1, "layer_norm_rows: empty rows");
  const double n = static_cast<double>(x.cols());
  Matrix y(x.rows(), x.cols());
  std::vector<double> inv_std(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) mean += x(i, j);
    mean /= n;
    double var = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double c = x(i, j) - mean;
      var += c * c;
    }
    var /= n;
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < x.cols(); ++j) y(i, j) = (x(i, j) - mean) * inv_std[i];
  }
  Id o = push(std::move(y));
  nodes_.back().back = [this, a, o, inv_std = std::move(inv_std), n] {
    Matrix& ga = g(a);
    const Matrix& yv = v(o);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.rows(); ++i) {
      double mean_g = 0.0, mean_gy = 0.0;
      for (std::size_t j = 0; j < ga.cols(); ++j) {
        mean_g += go(i, j);
        mean_gy += go(i, j) * yv(i, j);
      }
      mean_g /= n;
      mean_gy /= n;
      for (std::size_t j = 0; j < ga.cols(); ++j)
        ga(i, j) += inv_std[i] * (go(i, j) - mean_g - yv(i, j) * mean_gy);
    }
  };
  return o;
}

Tape::Id Tape::mul_row_broadcast(Id a, Id gain) {
  const Matrix& x = v(a);
  const Matrix& w = v(gain);
  require(w.rows() == 1 && w.cols() == x.cols(), "mul_row_broadcast: gain must be 1xC");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) * w(0, j);
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, gain, o] {
    Matrix& ga = g(a);
    Matrix& gw = g(gain);
    const Matrix& xv = v(a);
    const Matrix& wv = v(gain);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.rows(); ++i)
      for (std::size_t j = 0; j < ga.cols(); ++j) {
        ga(i, j) += go(i, j) * wv(0, j);
        gw(0, j) += go(i, j) * xv(i, j);
      }
  };
  return o;
}

Tape::Id Tape::add_row_broadcast(Id a, Id bias) {
  const Matrix& x = v(a);
  const Matrix& b = v(bias);
  require(b.rows() == 1 && b.cols() == x.cols(), "add_row_broadcast: bias must be 1xC");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) + b(0, j);
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, bias, o] {
    Matrix& ga = g(a);
    Matrix& gb = g(bias);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.rows(); ++i)
      for (std::size_t j = 0; j < ga.cols(); ++j) {
        ga(i, j) += go(i, j);
        gb(0, j) += go(i, j);
      }
  };
  return o;
}

namespace {
struct BlockDims {
  std::size_t la, lb, d;
};
BlockDims block_dims(const Matrix& a, const Matrix& b, int batch, bool nt) {
  if (batch <= 0 || a.rows() % static_cast<std::size_t>(batch) != 0 ||
      b.rows() % static_cast<std::size_t>(batch) != 0)
    throw DimensionError("bmm: row counts not divisible by batch");
  BlockDims bd{};
  bd.la = a.rows() / static_cast<std::size_t>(batch);
  bd.lb = b.rows() / static_cast<std::size_t>(batch);
  if (nt) {
    if (a.cols() != b.cols()) throw DimensionError("bmm_nt: column counts differ");
    bd.d = a.cols();
  } else {
    if (a.cols() != bd.lb) throw DimensionError("bmm_nn: inner dimensions differ");
    bd.d = b.cols();
  }
  return bd;
}
}  // namespace

Tape::Id Tape::bmm_nt(Id a, Id b, int batch) {
  const Matrix& x = v(a);
  const Matrix& y = v(b);
  const BlockDims bd = block_dims(x, y, batch, true);
  Matrix out(x.rows(), bd.lb);
  for (int blk = 0; blk < batch; ++blk) {
    const std::size_t ra = static_cast<std::size_t>(blk) * bd.la;
    const std::size_t rb = static_cast<std::size_t>(blk) * bd.lb;
    for (std::size_t i = 0; i < bd.la; ++i)
      for (std::size_t j = 0; j < bd.lb; ++j) {
        const double* xi = x.row(ra + i);
        const double* yj = y.row(rb + j);
        double s = 0.0;
        for (std::size_t t = 0; t < bd.d; ++t) s += xi[t] * yj[t];
        out(ra + i, j) = s;
      }
  }
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, b, o, batch, bd] {
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    const Matrix& xv = v(a);
    const Matrix& yv = v(b);
    const Matrix& go = g(o);
    for (int blk = 0; blk < batch; ++blk) {
      const std::size_t ra = static_cast<std::size_t>(blk) * bd.la;
      const std::size_t rb = static_cast<std::size_t>(blk) * bd.lb;
      for (std::size_t i = 0; i < bd.la; ++i)
        for (std::size_t j = 0; j < bd.lb; ++j) {
          const double gij = go(ra + i, j);
          if (gij == 0.0) continue;
          double* gai = ga.row(ra + i);
          double* gbj = gb.row(rb + j);
          const double* xi = xv.row(ra + i);
          const double* yj = yv.row(rb + j);
          for (std::size_t t = 0; t < bd.d; ++t) {
            gai[t] += gij * yj[t];
            gbj[t] += gij * xi[t];
          }
        }
    }
  };
  return o;
}

Tape::Id Tape::bmm_nn(Id a, Id b, int batch) {
  const Matrix& x = v(a);
  const Matrix& y = v(b);
  const BlockDims bd = block_dims(x, y, batch, false);
  Matrix out(x.rows(), bd.d);
  for (int blk = 0; blk < batch; ++blk) {
    const std::size_t ra = static_cast<std::size_t>(blk) * bd.la;
    const std::size_t rb = static_cast<std::size_t>(blk) * bd.lb;
    for (std::size_t i = 0; i < bd.la; ++i) {
      double* oi = out.row(ra + i);
      for (std::size_t t = 0; t < bd.lb; ++t) {
        const double s = x(ra + i, t);
        if (s == 0.0) continue;
        const double* yt = y.row(rb + t);
        for (std::size_t j = 0; j < bd.d; ++j) oi[j] += s * yt[j];
      }
    }
  }
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, b, o, batch, bd] {
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    const Matrix& xv = v(a);
    const Matrix& yv = v(b);
    const Matrix& go = g(o);
    for (int blk = 0; blk < batch; ++blk) {
      const std::size_t ra = static_cast<std::size_t>(blk) * bd.la;
      const std::size_t rb = static_cast<std::size_t>(blk) * bd.lb;
      for (std::size_t i = 0; i < bd.la; ++i)
        for (std::size_t t = 0; t < bd.lb; ++t) {
          const double* goi = go.row(ra + i);
          const double* yt = yv.row(rb + t);
          double s = 0.0;
          for (std::size_t j = 0; j < bd.d; ++j) s += goi[j] * yt[j];
          ga(ra + i, t) += s;
          const double xs = xv(ra + i, t);
          if (xs != 0.0) {
            double* gbt = gb.row(rb + t);
            for (std::size_t j = 0; j < bd.d; ++j) gbt[j] += xs * goi[j];
          }
        }
    }
  };
  return o;
}

Tape::Id Tape::rows_dot(Id a, Id b) {
  const Matrix& x = v(a);
  const Matrix& y = v(b);
  require(x.same_shape(y), "rows_dot: shape mismatch");
  Matrix out(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* xi = x.row(i);
    const double* yi = y.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) s += xi[j] * yi[j];
    out(i, 0) = s;
  }
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, b, o] {
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    const Matrix& xv = v(a);
    const Matrix& yv = v(b);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.rows(); ++i) {
      const double gi = go(i, 0);
      if (gi == 0.0) continue;
      double* gai = ga.row(i);
      double* gbi = gb.row(i);
      const double* xi = xv.row(i);
      const double* yi = yv.row(i);
      for (std::size_t j = 0; j < ga.cols(); ++j) {
        gai[j] += gi * yi[j];
        gbi[j] += gi * xi[j];
      }
    }
  };
  return o;
}

Tape::Id Tape::logsumexp_rows(Id a) {
  const Matrix& x = v(a);
  Matrix out(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double mx = x(i, 0);
    for (std::size_t j = 1; j < x.cols(); ++j) mx = std::max(mx, x(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) s += std::exp(x(i, j) - mx);
    out(i, 0) = mx + std::log(s);
  }
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, o] {
    Matrix& ga = g(a);
    const Matrix& xv = v(a);
    const Matrix& lse = v(o);
    const Matrix& go = g(o);
    for (std::size_t i = 0; i < ga.rows(); ++i) {
      const double gi = go(i, 0);
      if (gi == 0.0) continue;
      for (std::size_t j = 0; j < ga.cols(); ++j)
        ga(i, j) += gi * std::exp(xv(i, j) - lse(i, 0));
    }
  };
  return o;
}

Tape::Id Tape::mean_all(Id a) {
  const Matrix& x = v(a);
  Matrix out(1, 1, x.sum() / static_cast<double>(x.size()));
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, o] {
    const double gi = g(o)(0, 0) / static_cast<double>(v(a).size());
    Matrix& ga = g(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += gi;
  };
  return o;
}

Tape::Id Tape::sum_all(Id a) {
  Matrix out(1, 1, v(a).sum());
  Id o = push(std::move(out));
  nodes_.back().back = [this, a, o] {
    const double gi = g(o)(0, 0);
    Matrix& ga = g(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += gi;
  };
  return o;
}

void Tape::backward(Id loss) {
  const Matrix& lv = v(loss);
  if (lv.rows() != 1 || lv.cols() != 1)
    throw ContractError("backward: loss must be a 1x1 scalar, got " + shape_str(lv));
  for (auto& n : nodes_) n.grad = Matrix(n.value.rows(), n.value.cols());
  nodes_[static_cast<std::size_t>(loss)].grad(0, 0) = 1.0;
  for (Id i = loss; i >= 0; --i) {
    auto& n = nodes_[static_cast<std::size_t>(i)];
    if (n.back) n.back();
  }
  for (auto& n : nodes_) {
    if (n.store != nullptr) {
      auto& e = n.store->entry(n.store_index);
      add_into(e.grad, n.grad);
      e.grad_populated = true;
    }
  }
}

}  // namespace spectran::numkit
