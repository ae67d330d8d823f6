#include "concord/partition.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "concord/lp.hpp"

namespace concord {

namespace {

// max x_i over {x in L, x >= 0, sum x <= 1}; also returns the maximizer.
double support_lp(const Subspace& l, Index i, Vec& x_out) {
    const Index n = l.ambient_dim(), m = l.dim();
    // Vars: y (m free), x (n >= 0), s (>= 0).
    lp::LpProblem p = lp::LpProblem::make(n + 1, m + n + 1);
    for (Index r = 0; r < n; ++r) {
        p.eq_matrix.block(r, 0, 1, m) = -l.basis().row(r);
        p.eq_matrix(r, m + r) = 1.0;  // x - B y = 0
    }
    p.eq_matrix.block(n, m, 1, n).setOnes();
    p.eq_matrix(n, m + n) = 1.0;
    p.eq_rhs[n] = 1.0;
    p.lower.tail(n + 1).setZero();
    p.objective[m + i] = 1.0;
    p.maximize = true;
    lp::LpSolution s = lp::solve_lp(p);
    if (s.status != lp::LpStatus::Optimal) throw NumericalFailure("goldman_tucker: index LP failed");
    x_out = s.primal.segment(m, n);
    return s.value;
}

// L_E = {x in L : x_i = 0 for i outside E}, expressed in the coordinates of
// E. Returns the (|E| x dim) basis; dim may be 0 or |E|.
Mat restrict_to_block(const Subspace& l, const std::vector<Index>& e_set) {
    const Index n = l.ambient_dim();
    std::vector<Index> outside;
    for (Index i = 0; i < n; ++i)
        if (std::find(e_set.begin(), e_set.end(), i) == e_set.end()) outside.push_back(i);
    Mat rows = Mat::Zero(static_cast<Index>(outside.size()), n);
    for (size_t r = 0; r < outside.size(); ++r) rows(static_cast<Index>(r), outside[r]) = 1.0;
    Mat ker = kernel_basis(rows * l.basis());
    Mat amb = l.basis() * ker;  // n x k, supported on E
    Mat block(static_cast<Index>(e_set.size()), ker.cols());
    for (size_t r = 0; r < e_set.size(); ++r) block.row(static_cast<Index>(r)) = amb.row(e_set[r]);
    // Orthonormalize in the block coordinates.
    if (block.cols() == 0) return block;
    Eigen::ColPivHouseholderQR<Mat> qr(block);
    qr.setThreshold(tol::rank_rel);
    Index rank = qr.rank();
    return qr.householderQ() * Mat::Identity(block.rows(), rank);
}

// nu = sigma for a full block L_E = V_E: min over the dual-norm values on
// Delta(K*). Closed forms for the supported norms.
double full_block_nu(Index ne, const NormPair& np) {
    NormSpec dual_primal = dual_spec(np.primal);
    switch (dual_primal.kind) {
        case NormSpec::Kind::LInf: return 1.0 / static_cast<double>(ne);
        case NormSpec::Kind::L2: return 1.0 / std::sqrt(static_cast<double>(ne));
        case NormSpec::Kind::L1: return 1.0;
        default: break;
    }
    // Induced kinds over the orthant reduce to the plain norms.
    if (dual_primal.kind == NormSpec::Kind::InducedE) return 1.0 / static_cast<double>(ne);
    if (dual_primal.kind == NormSpec::Kind::InducedEDual) return 1.0;
    throw UnsupportedNorm("partition_measures: full block with unsupported norm");
}

NormPair block_norm_pair(const NormPair& np, Index ne) {
    // Rebind induced norms to the block orthant.
    auto rebind = [&](const NormSpec& s) {
        if (s.kind == NormSpec::Kind::InducedE) return NormSpec::induced_e(Cone::orthant(ne));
        if (s.kind == NormSpec::Kind::InducedEDual)
            return NormSpec::induced_e_dual(Cone::orthant(ne));
        return s;
    };
    return {rebind(np.primal), rebind(np.tri)};
}

}  // namespace

GtPartition goldman_tucker(const Subspace& l) {
    const Index n = l.ambient_dim();
    Subspace lperp = orth_complement(l);
    GtPartition gt;
    Vec xc = Vec::Zero(n), yc = Vec::Zero(n);
    for (Index i = 0; i < n; ++i) {
        Vec xi, yi;
        double primal_max = support_lp(l, i, xi);
        double dual_max = support_lp(lperp, i, yi);
        bool in_b = primal_max > tol::strict_pos;
        bool in_n = dual_max > tol::strict_pos;
        if (in_b == in_n)
            throw NumericalFailure("goldman_tucker: index " + std::to_string(i) +
                                   " not strictly separated");
        if (in_b) {
            gt.b_set.push_back(i);
            xc += xi;
        } else {
            gt.n_set.push_back(i);
            yc += yi;
        }
    }
    auto normalize_cert = [n](Vec v) {
        double s = v.sum();
        if (s > 0) v /= s;
        for (Index i = 0; i < n; ++i)
            if (v[i] <= 1e-12) v[i] = 0.0;
        return v;
    };
    gt.x_cert = normalize_cert(xc);
    gt.y_cert = normalize_cert(yc);
    return gt;
}

PartitionMeasures partition_measures(const Subspace& l, const NormPair& np) {
    GtPartition gt = goldman_tucker(l);
    PartitionMeasures out;

    auto block_measures = [&](const Subspace& side, const std::vector<Index>& e_set,
                              std::optional<MeasureCertificate>& nu_out,
                              std::optional<MeasureCertificate>& sigma_out, Index& dim_out) {
        if (e_set.empty()) return;
        const Index ne = static_cast<Index>(e_set.size());
        Mat basis = restrict_to_block(side, e_set);
        dim_out = basis.cols();
        if (basis.cols() == 0)
            throw NumericalFailure("partition_measures: empty block subspace");
        NormPair bnp = block_norm_pair(np, ne);
        if (basis.cols() == ne) {
            MeasureCertificate c;
            c.value = full_block_nu(ne, bnp);
            c.path = Path::ClosedForm;
            nu_out = c;
            sigma_out = c;
            return;
        }
        Subspace sub{basis};
        ConePtr k = Cone::orthant(ne);
        nu_out = nu(sub, k, bnp);
        sigma_out = sigma(sub, k, bnp);
    };

    block_measures(l, gt.b_set, out.nu_b, out.sigma_b, out.dim_b);
    block_measures(orth_complement(l), gt.n_set, out.nu_n, out.sigma_n, out.dim_n);
    return out;
}

BlockDecomposition block_decompose(const LinearMap& a, const GtPartition& gt) {
    const Mat& m = a.matrix;
    const Index mcols = m.cols();
    Eigen::JacobiSVD<Mat> svd(m);
    if (svd.singularValues()[svd.singularValues().size() - 1] <= 1e-10)
        throw NotInjective("block_decompose: matrix is not injective");

    const Index nb = static_cast<Index>(gt.b_set.size());
    const Index nn = static_cast<Index>(gt.n_set.size());
    Mat a_b(nb, mcols), a_n(nn, mcols);
    for (Index r = 0; r < nb; ++r) a_b.row(r) = m.row(gt.b_set[static_cast<size_t>(r)]);
    for (Index r = 0; r < nn; ++r) a_n.row(r) = m.row(gt.n_set[static_cast<size_t>(r)]);

    BlockDecomposition out;
    // R^m_B = Image(A_B'), R^m_N = ker(A_B).
    if (nb > 0) {
        Eigen::ColPivHouseholderQR<Mat> qr(a_b.transpose());
        qr.setThreshold(tol::rank_rel);
        Index k = qr.rank();
        out.basis_b = qr.householderQ() * Mat::Identity(mcols, k);
    } else {
        out.basis_b = Mat::Zero(mcols, 0);
    }
    out.basis_n = nb > 0 ? kernel_basis(a_b) : Mat::Identity(mcols, mcols);

    out.a_bb = a_b * out.basis_b;
    out.a_nb = a_n * out.basis_b;
    out.a_nn = a_n * out.basis_n;

    auto min_sv = [](const Mat& x) {
        if (x.rows() == 0 || x.cols() == 0) return kInfinity;
        Eigen::JacobiSVD<Mat> s(x);
        return s.singularValues()[s.singularValues().size() - 1];
    };
    if (out.a_bb.cols() > 0 && min_sv(out.a_bb) <= 1e-10)
        throw RankDeficientBlock("block_decompose: A_BB rank deficient");
    if (out.a_nn.cols() > 0 && min_sv(out.a_nn) <= 1e-10)
        throw RankDeficientBlock("block_decompose: A_NN rank deficient");

    // Reconstruction residual of the permuted block form.
    Mat u(mcols, out.basis_b.cols() + out.basis_n.cols());
    u << out.basis_b, out.basis_n;
    Mat permuted(nb + nn, mcols);
    for (Index r = 0; r < nb; ++r) permuted.row(r) = m.row(gt.b_set[static_cast<size_t>(r)]);
    for (Index r = 0; r < nn; ++r) permuted.row(nb + r) = m.row(gt.n_set[static_cast<size_t>(r)]);
    Mat blocks = Mat::Zero(nb + nn, mcols);
    if (nb > 0) blocks.block(0, 0, nb, out.a_bb.cols()) = out.a_bb;
    if (nn > 0) {
        blocks.block(nb, 0, nn, out.a_nb.cols()) = out.a_nb;
        blocks.block(nb, out.a_nb.cols(), nn, out.a_nn.cols()) = out.a_nn;
    }
    out.reconstruction_residual = (permuted * u - blocks).cwiseAbs().maxCoeff();

    // Per-block sandwich reports where the block subspace is proper.
    if (nb > 0 && out.a_bb.cols() > 0 && out.a_bb.cols() < nb) {
        LinearMap bb{out.a_bb, NormSpec::l2(), a.codomain};
        out.sandwich_bb = renegar_sandwich(bb, Cone::orthant(nb));
    }
    if (nn > 0 && out.a_nn.cols() > 0 && out.a_nn.cols() < nn) {
        LinearMap nnm{out.a_nn, NormSpec::l2(), a.codomain};
        out.sandwich_nn = renegar_sandwich(nnm, Cone::orthant(nn));
    }
    return out;
}

PartitionPreconditionReport partition_precondition(const LinearMap& a) {
    if (!a.codomain.primal.is_l2() || !a.codomain.tri.is_l2())
        throw UnsupportedNorm("partition_precondition: Euclidean norm pair required");
    Subspace l = a.image();
    GtPartition gt = goldman_tucker(l);
    const Index n = l.ambient_dim();

    PartitionPreconditionReport rep;
    rep.d = Vec::Ones(n);
    for (Index i : gt.b_set) rep.d[i] = 1.0 / gt.x_cert[i];
    for (Index i : gt.n_set) rep.d[i] = gt.y_cert[i];

    Mat da = rep.d.asDiagonal() * a.matrix;
    Subspace dl = orthonormal_basis(da);
    rep.partition_after = goldman_tucker(dl);
    if (rep.partition_after.b_set != gt.b_set || rep.partition_after.n_set != gt.n_set)
        throw NumericalFailure("partition_precondition: partition not preserved");

    LinearMap da_map{da, a.domain_norm, a.codomain};
    BlockDecomposition dec = block_decompose(da_map, gt);

    // Balance each diagonal block; R assembles the two block changes of basis.
    auto balance = [](const Mat& block, const Mat& basis) {
        if (block.cols() == 0) return basis;
        Eigen::HouseholderQR<Mat> qr(block);
        Mat rfac = qr.matrixQR().topRows(block.cols()).triangularView<Eigen::Upper>();
        return Mat(basis * rfac.inverse());
    };
    Mat rb = balance(dec.a_bb, dec.basis_b);
    Mat rn = balance(dec.a_nn, dec.basis_n);
    rep.r = Mat(a.matrix.cols(), rb.cols() + rn.cols());
    rep.r << rb, rn;

    // Rank bounds 1/sqrt(|B|), 1/sqrt(|N|): the block application of the
    // preconditioning corollary (r = rank of the block orthant).
    rep.bound_b = gt.b_set.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(gt.b_set.size()));
    rep.bound_n = gt.n_set.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(gt.n_set.size()));

    NormPair euclid = NormPair::l2_l2();
    PartitionMeasures pm = partition_measures(dl, euclid);
    if (pm.nu_b) rep.nu_b_after = pm.nu_b->value;
    if (pm.nu_n) rep.nu_n_after = pm.nu_n->value;
    return rep;
}

}  // namespace concord
