//! HKM predictor-corrector interior-point iteration.

use nalgebra::DMatrix;

use super::linalg::{cholesky_in_place, forward_solve_cols, max_psd_step, spd_solve_in_place};
use super::{
    Constraint, LinearForm, MatEntry, SdpProblem, SdpSolution, SolveOptions, SolveStatus,
    PHASE1_FEASIBLE_TOL,
};
use crate::scalar::{conv, fabs, fmax, fmin, Scalar};

/// Constraint partitioning: rows touching PSD blocks are grouped into
/// connected components (the Schur complement is block diagonal across
/// them); rows that touch only free variables go through the saddle system.
struct Structure {
    /// Per component: constraint indices (ascending) and covered blocks.
    comps: Vec<Vec<usize>>,
    /// Constraint index -> (component, position within component); `None`
    /// for pure-free rows.
    place: Vec<Option<(usize, usize)>>,
    /// Pure-free constraint indices in order.
    pure_rows: Vec<usize>,
}

fn analyze<T: Scalar>(p: &SdpProblem<T>) -> Structure {
    let nb = p.block_dims.len();
    let m = p.constraints.len();
    // Union-find over blocks.
    let mut parent: Vec<usize> = (0..nb).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for c in &p.constraints {
        let mut first: Option<usize> = None;
        for (e, _) in &c.form.block_terms {
            match first {
                None => first = Some(find(&mut parent, e.block)),
                Some(r) => {
                    let rb = find(&mut parent, e.block);
                    if rb != r {
                        parent[rb] = r;
                    }
                }
            }
        }
    }
    // Group constraints by block root, in first-use order.
    let mut root_comp: Vec<Option<usize>> = vec![None; nb];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut place: Vec<Option<(usize, usize)>> = vec![None; m];
    let mut pure_rows = Vec::new();
    for (i, c) in p.constraints.iter().enumerate() {
        if c.form.block_terms.is_empty() {
            pure_rows.push(i);
            continue;
        }
        let root = find(&mut parent, c.form.block_terms[0].e_block());
        let comp = match root_comp[root] {
            Some(k) => k,
            None => {
                root_comp[root] = Some(comps.len());
                comps.push(Vec::new());
                comps.len() - 1
            }
        };
        place[i] = Some((comp, comps[comp].len()));
        comps[comp].push(i);
    }
    Structure {
        comps,
        place,
        pure_rows,
    }
}

trait EntryExt {
    fn e_block(&self) -> usize;
}
impl<T> EntryExt for (MatEntry, T) {
    fn e_block(&self) -> usize {
        self.0.block
    }
}

/// `<A_i, Z>` for a possibly non-symmetric `Z` (equals `<A_i, sym(Z)>`).
fn form_dot<T: Scalar>(form: &LinearForm<T>, mats: &[DMatrix<T>], frees: &[T]) -> T {
    let mut acc = T::zero();
    for (e, v) in &form.block_terms {
        let z = &mats[e.block];
        if e.row == e.col {
            acc += *v * z[(e.row, e.col)];
        } else {
            acc += *v * (z[(e.row, e.col)] + z[(e.col, e.row)]);
        }
    }
    for (i, v) in &form.free_terms {
        acc += *v * frees[*i];
    }
    acc
}

/// Accumulate `w * A_i` into the dense symmetric accumulators.
fn form_axpy<T: Scalar>(form: &LinearForm<T>, w: T, out: &mut [DMatrix<T>]) {
    for (e, v) in &form.block_terms {
        let m = &mut out[e.block];
        m[(e.row, e.col)] += w * *v;
        if e.row != e.col {
            m[(e.col, e.row)] += w * *v;
        }
    }
}

struct State<T: Scalar> {
    x: Vec<DMatrix<T>>,
    s: Vec<DMatrix<T>>,
    y: Vec<T>,
    u: Vec<T>,
}

struct Residuals<T: Scalar> {
    /// b - A(X) - B u
    r_p: Vec<T>,
    /// C - S - A*(y), per block
    r_d: Vec<DMatrix<T>>,
    /// f - B' y
    r_f: Vec<T>,
    mu: T,
    p_norm: T,
    d_norm: T,
    f_norm: T,
}

fn residuals<T: Scalar>(p: &SdpProblem<T>, st: &State<T>) -> Residuals<T> {
    let m = p.constraints.len();
    let mut r_p = vec![T::zero(); m];
    for (i, c) in p.constraints.iter().enumerate() {
        r_p[i] = c.rhs - form_dot(&c.form, &st.x, &st.u);
    }
    let mut r_d: Vec<DMatrix<T>> = p
        .block_dims
        .iter()
        .map(|&d| DMatrix::zeros(d, d))
        .collect();
    form_axpy(&p.objective, T::one(), &mut r_d);
    for (i, c) in p.constraints.iter().enumerate() {
        form_axpy(&c.form, -st.y[i], &mut r_d);
    }
    for (k, s) in st.s.iter().enumerate() {
        r_d[k] -= s;
    }
    let mut r_f = vec![T::zero(); p.free_count];
    for (i, v) in &p.objective.free_terms {
        r_f[*i] += *v;
    }
    for (i, c) in p.constraints.iter().enumerate() {
        for (j, v) in &c.form.free_terms {
            r_f[*j] -= *v * st.y[i];
        }
    }
    let mut dot = T::zero();
    let mut ntot = T::zero();
    for (x, s) in st.x.iter().zip(&st.s) {
        dot += x.dot(s);
        ntot += conv(x.nrows() as f64);
    }
    let mu = if ntot > T::zero() { dot / ntot } else { T::zero() };
    let p_norm = r_p.iter().fold(T::zero(), |a, v| fmax(a, fabs(*v)));
    let d_norm = r_d
        .iter()
        .fold(T::zero(), |a, m| fmax(a, m.amax()));
    let f_norm = r_f.iter().fold(T::zero(), |a, v| fmax(a, fabs(*v)));
    Residuals {
        r_p,
        r_d,
        r_f,
        mu,
        p_norm,
        d_norm,
        f_norm,
    }
}

/// Factorized Schur system for one iteration.
struct Newton<T: Scalar> {
    /// Cholesky factors of the per-component Schur blocks.
    m_chol: Vec<DMatrix<T>>,
    /// F1 = M^{-1} B1 stored per component (rows = comp constraints).
    f1: Vec<DMatrix<T>>,
    /// LU of the saddle matrix over (free vars, pure rows).
    saddle: Option<nalgebra::LU<T, nalgebra::Dyn, nalgebra::Dyn>>,
    s_inv: Vec<DMatrix<T>>,
    x_chol: Vec<DMatrix<T>>,
    s_chol: Vec<DMatrix<T>>,
}

fn factor<T: Scalar>(
    p: &SdpProblem<T>,
    stct: &Structure,
    st: &State<T>,
) -> Result<Newton<T>, ()> {
    let nb = p.block_dims.len();
    let mut x_chol = Vec::with_capacity(nb);
    let mut s_chol = Vec::with_capacity(nb);
    let mut s_inv = Vec::with_capacity(nb);
    for k in 0..nb {
        let mut lx = st.x[k].clone();
        cholesky_in_place(&mut lx)?;
        x_chol.push(lx);
        let mut ls = st.s[k].clone();
        cholesky_in_place(&mut ls)?;
        // S^{-1} from the factor.
        let d = p.block_dims[k];
        let mut inv = DMatrix::identity(d, d);
        for j in 0..d {
            let mut col: Vec<T> = inv.column(j).iter().copied().collect();
            spd_solve_in_place(&ls, &mut col);
            inv.column_mut(j).copy_from_slice(&col);
        }
        s_chol.push(ls);
        s_inv.push(inv);
    }

    // Per-block entry lists for the Schur formation.
    let mut m_chol = Vec::with_capacity(stct.comps.len());
    for comp in &stct.comps {
        let nc = comp.len();
        let mut mm = DMatrix::<T>::zeros(nc, nc);
        // Gather entries of this component per block.
        let mut per_block: Vec<Vec<(usize, usize, usize, T)>> = vec![Vec::new(); nb];
        for (local, &ci) in comp.iter().enumerate() {
            for (e, v) in &p.constraints[ci].form.block_terms {
                per_block[e.block].push((local, e.row, e.col, *v));
            }
        }
        for k in 0..nb {
            let entries = &per_block[k];
            if entries.is_empty() {
                continue;
            }
            let si = &s_inv[k];
            let x = &st.x[k];
            for (pi, &(li, r1, c1, v1)) in entries.iter().enumerate() {
                for &(lj, r2, c2, v2) in entries.iter().take(pi + 1) {
                    // tr(A_i S^{-1} A_j X) expanded over the symmetric
                    // extensions of both stored entries.
                    let mut g = si[(c1, r2)] * x[(c2, r1)];
                    if r2 != c2 {
                        g += si[(c1, c2)] * x[(r2, r1)];
                    }
                    if r1 != c1 {
                        g += si[(r1, r2)] * x[(c2, c1)];
                        if r2 != c2 {
                            g += si[(r1, c2)] * x[(r2, c1)];
                        }
                    }
                    let val = v1 * v2 * g;
                    if li >= lj {
                        mm[(li, lj)] += val;
                    } else {
                        mm[(lj, li)] += val;
                    }
                }
            }
        }
        // Mirror the lower triangle.
        for i in 0..nc {
            for j in 0..i {
                mm[(j, i)] = mm[(i, j)];
            }
        }
        if cholesky_in_place(&mut mm).is_err() {
            // One regularized retry before giving up.
            let mut diag_max = T::zero();
            for i in 0..nc {
                diag_max = fmax(diag_max, fabs(mm[(i, i)]));
            }
            let reg = fmax(conv(1e-13) * diag_max, conv(1e-30));
            for i in 0..nc {
                mm[(i, i)] += reg;
            }
            cholesky_in_place(&mut mm)?;
        }
        m_chol.push(mm);
    }

    // F1 = M^{-1} B1, per component.
    let nf = p.free_count;
    let mut f1 = Vec::with_capacity(stct.comps.len());
    for (ci, comp) in stct.comps.iter().enumerate() {
        let mut b1 = DMatrix::<T>::zeros(comp.len(), nf);
        for (local, &cons) in comp.iter().enumerate() {
            for (j, v) in &p.constraints[cons].form.free_terms {
                b1[(local, *j)] += *v;
            }
        }
        if nf > 0 && comp.len() > 0 {
            forward_solve_cols(&m_chol[ci], &mut b1);
            // Finish L' solve column by column.
            for j in 0..nf {
                let l = &m_chol[ci];
                let n = comp.len();
                for i in (0..n).rev() {
                    let mut s = b1[(i, j)];
                    for k2 in (i + 1)..n {
                        s -= l[(k2, i)] * b1[(k2, j)];
                    }
                    b1[(i, j)] = s / l[(i, i)];
                }
            }
        }
        f1.push(b1);
    }

    // Saddle matrix over (free, pure rows).
    let np = stct.pure_rows.len();
    let saddle = if nf + np > 0 {
        let mut k = DMatrix::<T>::zeros(nf + np, nf + np);
        // top-left: B1' M^{-1} B1 = B1' F1.
        for (ci, comp) in stct.comps.iter().enumerate() {
            let mut b1 = DMatrix::<T>::zeros(comp.len(), nf);
            for (local, &cons) in comp.iter().enumerate() {
                for (j, v) in &p.constraints[cons].form.free_terms {
                    b1[(local, *j)] += *v;
                }
            }
            let prod = b1.transpose() * &f1[ci];
            for i in 0..nf {
                for j in 0..nf {
                    k[(i, j)] += prod[(i, j)];
                }
            }
        }
        // top-right: -B2', bottom-left: B2.
        for (pi, &cons) in stct.pure_rows.iter().enumerate() {
            for (j, v) in &p.constraints[cons].form.free_terms {
                k[(*j, nf + pi)] = -*v;
                k[(nf + pi, *j)] = *v;
            }
        }
        let lu = k.lu();
        if lu.determinant() == T::zero() {
            return Err(());
        }
        Some(lu)
    } else {
        None
    };

    Ok(Newton {
        m_chol,
        f1,
        saddle,
        s_inv,
        x_chol,
        s_chol,
    })
}

struct Direction<T: Scalar> {
    dx: Vec<DMatrix<T>>,
    ds: Vec<DMatrix<T>>,
    dy: Vec<T>,
    du: Vec<T>,
}

/// Solve the Newton system for centering target `nu` (0 for the affine
/// predictor) and optional Mehrotra correction matrices.
#[allow(clippy::too_many_arguments)]
fn direction<T: Scalar>(
    p: &SdpProblem<T>,
    stct: &Structure,
    st: &State<T>,
    nt: &Newton<T>,
    res: &Residuals<T>,
    nu: T,
    corr: Option<&Direction<T>>,
) -> Result<Direction<T>, ()> {
    let nb = p.block_dims.len();
    let m = p.constraints.len();
    let nf = p.free_count;

    // Z_k = X R_d S^{-1} - nu S^{-1} + X (+ dXa dSa S^{-1}).
    let mut z: Vec<DMatrix<T>> = Vec::with_capacity(nb);
    for k in 0..nb {
        let mut zk = &st.x[k] * &res.r_d[k] * &nt.s_inv[k];
        zk += &st.x[k];
        if nu != T::zero() {
            zk -= nt.s_inv[k].scale(nu);
        }
        if let Some(c) = corr {
            zk += &c.dx[k] * &c.ds[k] * &nt.s_inv[k];
        }
        z.push(zk);
    }
    // h_i = r_p_i + <A_i, Z>.
    let mut h = vec![T::zero(); m];
    for (i, c) in p.constraints.iter().enumerate() {
        h[i] = res.r_p[i] + form_dot(&c.form, &z, &[]);
    }

    // w = M^{-1} h1 per component.
    let mut w: Vec<Vec<T>> = Vec::with_capacity(stct.comps.len());
    for (ci, comp) in stct.comps.iter().enumerate() {
        let mut v: Vec<T> = comp.iter().map(|&i| h[i]).collect();
        spd_solve_in_place(&nt.m_chol[ci], &mut v);
        w.push(v);
    }

    // Saddle solve for (du, dy2).
    let np = stct.pure_rows.len();
    let mut du = vec![T::zero(); nf];
    let mut dy2 = vec![T::zero(); np];
    if nf + np > 0 {
        let mut rhs = DMatrix::<T>::zeros(nf + np, 1);
        // B1' w - r_f
        for (ci, comp) in stct.comps.iter().enumerate() {
            for (local, &cons) in comp.iter().enumerate() {
                for (j, v) in &p.constraints[cons].form.free_terms {
                    rhs[(*j, 0)] += *v * w[ci][local];
                }
            }
        }
        for j in 0..nf {
            rhs[(j, 0)] -= res.r_f[j];
        }
        for (pi, &cons) in stct.pure_rows.iter().enumerate() {
            rhs[(nf + pi, 0)] = h[cons];
        }
        let sol = nt.saddle.as_ref().ok_or(())?.solve(&rhs).ok_or(())?;
        for j in 0..nf {
            du[j] = sol[(j, 0)];
        }
        for pi in 0..np {
            dy2[pi] = sol[(nf + pi, 0)];
        }
    }

    // dy1 = w - F1 du.
    let mut dy = vec![T::zero(); m];
    for (ci, comp) in stct.comps.iter().enumerate() {
        for (local, &cons) in comp.iter().enumerate() {
            let mut v = w[ci][local];
            for j in 0..nf {
                v -= nt.f1[ci][(local, j)] * du[j];
            }
            dy[cons] = v;
        }
    }
    for (pi, &cons) in stct.pure_rows.iter().enumerate() {
        dy[cons] = dy2[pi];
    }

    // dS = R_d - A*(dy); dX = nu S^{-1} - X - sym(X dS S^{-1}) - sym(corr).
    let mut ds: Vec<DMatrix<T>> = res.r_d.clone();
    for (i, c) in p.constraints.iter().enumerate() {
        form_axpy(&c.form, -dy[i], &mut ds);
    }
    let mut dx: Vec<DMatrix<T>> = Vec::with_capacity(nb);
    for k in 0..nb {
        let mut acc = &st.x[k] * &ds[k] * &nt.s_inv[k];
        if let Some(c) = corr {
            acc += &c.dx[k] * &c.ds[k] * &nt.s_inv[k];
        }
        let half: T = conv(0.5);
        let sym = (&acc + acc.transpose()).scale(half);
        let mut dxk = -sym - &st.x[k];
        if nu != T::zero() {
            dxk += nt.s_inv[k].scale(nu);
        }
        dx.push(dxk);
    }

    Ok(Direction { dx, ds, dy, du })
}

fn step_lengths<T: Scalar>(
    st: &State<T>,
    nt: &Newton<T>,
    dir: &Direction<T>,
    frac: T,
) -> (T, T) {
    let mut ap = T::one();
    let mut ad = T::one();
    for k in 0..st.x.len() {
        if let Some(a) = max_psd_step(&nt.x_chol[k], &dir.dx[k]) {
            ap = fmin(ap, frac * a);
        }
        if let Some(a) = max_psd_step(&nt.s_chol[k], &dir.ds[k]) {
            ad = fmin(ad, frac * a);
        }
    }
    (ap, ad)
}

fn objective_values<T: Scalar>(p: &SdpProblem<T>, st: &State<T>) -> (T, T) {
    let pobj = form_dot(&p.objective, &st.x, &st.u);
    let mut dobj = T::zero();
    for (i, c) in p.constraints.iter().enumerate() {
        dobj += c.rhs * st.y[i];
    }
    (pobj, dobj)
}

fn initial_state<T: Scalar>(p: &SdpProblem<T>) -> State<T> {
    let mut a_scale = T::one();
    let mut b_scale = T::one();
    for c in &p.constraints {
        let mut fr = T::zero();
        for (_, v) in &c.form.block_terms {
            fr += *v * *v;
        }
        let fr = fr.sqrt();
        a_scale = fmax(a_scale, fr);
        b_scale = fmax(b_scale, fabs(c.rhs) / fmax(T::one(), fr));
    }
    let mut c_scale = T::zero();
    for (_, v) in &p.objective.block_terms {
        c_scale = fmax(c_scale, fabs(*v));
    }
    for (_, v) in &p.objective.free_terms {
        c_scale = fmax(c_scale, fabs(*v));
    }
    let nmax = p.block_dims.iter().copied().max().unwrap_or(1) as f64;
    let ex = fmax(conv::<T>(10.0), conv::<T>(nmax.sqrt()) * b_scale);
    let es = fmax(conv::<T>(10.0), fmax(conv::<T>(nmax.sqrt()), c_scale + a_scale));
    State {
        x: p.block_dims
            .iter()
            .map(|&d| DMatrix::identity(d, d).scale(ex))
            .collect(),
        s: p.block_dims
            .iter()
            .map(|&d| DMatrix::identity(d, d).scale(es))
            .collect(),
        y: vec![T::zero(); p.constraints.len()],
        u: vec![T::zero(); p.free_count],
    }
}

fn finish<T: Scalar>(
    p: &SdpProblem<T>,
    st: State<T>,
    status: SolveStatus,
    iterations: usize,
) -> SdpSolution<T> {
    let (pobj, dobj) = objective_values(p, &st);
    let gap = fabs(pobj - dobj) / (T::one() + fmax(fabs(pobj), fabs(dobj)));
    SdpSolution {
        status,
        blocks: st.x,
        frees: st.u,
        y: st.y,
        slacks: st.s,
        primal_obj: pobj,
        dual_obj: dobj,
        gap,
        iterations,
        phase1_slack: None,
    }
}

pub fn solve<T: Scalar>(p: &SdpProblem<T>, opts: &SolveOptions<T>) -> SdpSolution<T> {
    if let Err(e) = p.validate() {
        if opts.verbose {
            eprintln!("sdp: invalid problem: {e}");
        }
        return finish(p, initial_state(p), SolveStatus::NumErr, 0);
    }
    let stct = analyze(p);
    let mut st = initial_state(p);
    let mut b_inf = T::one();
    for c in &p.constraints {
        b_inf = fmax(b_inf, fabs(c.rhs));
    }
    let mut c_inf = T::one();
    for (_, v) in &p.objective.block_terms {
        c_inf = fmax(c_inf, fabs(*v));
    }
    for (_, v) in &p.objective.free_terms {
        c_inf = fmax(c_inf, fabs(*v));
    }

    let mut stall = 0usize;
    for it in 0..opts.max_iter {
        let res = residuals(p, &st);
        if !res.mu.is_finite() {
            return finish(p, st, SolveStatus::NumErr, it);
        }
        let (pobj, dobj) = objective_values(p, &st);
        let gap = fabs(pobj - dobj) / (T::one() + fmax(fabs(pobj), fabs(dobj)));
        let p_rel = res.p_norm / b_inf;
        let d_rel = fmax(res.d_norm, res.f_norm) / c_inf;
        if opts.verbose {
            eprintln!(
                "it {it:3}  mu {:9.2e}  gap {:9.2e}  pres {:9.2e}  dres {:9.2e}",
                res.mu.to_f64().unwrap_or(f64::NAN),
                gap.to_f64().unwrap_or(f64::NAN),
                p_rel.to_f64().unwrap_or(f64::NAN),
                d_rel.to_f64().unwrap_or(f64::NAN)
            );
        }
        if gap <= opts.tol_gap && p_rel <= opts.tol_feas && d_rel <= opts.tol_feas {
            return finish(p, st, SolveStatus::Optimal, it);
        }

        let nt = match factor(p, &stct, &st) {
            Ok(nt) => nt,
            Err(()) => return finish(p, st, SolveStatus::NumErr, it),
        };

        // Predictor (affine scaling).
        let aff = match direction(p, &stct, &st, &nt, &res, T::zero(), None) {
            Ok(d) => d,
            Err(()) => return finish(p, st, SolveStatus::NumErr, it),
        };
        let (ap_aff, ad_aff) = step_lengths(&st, &nt, &aff, opts.step_frac);
        let mut dot_aff = T::zero();
        let mut ntot = T::zero();
        for k in 0..st.x.len() {
            let xa = &st.x[k] + aff.dx[k].scale(ap_aff);
            let sa = &st.s[k] + aff.ds[k].scale(ad_aff);
            dot_aff += xa.dot(&sa);
            ntot += conv(st.x[k].nrows() as f64);
        }
        let mu_aff = dot_aff / ntot;
        let ratio = fmax(T::zero(), fmin(mu_aff / res.mu, T::one()));
        let sigma = ratio * ratio * ratio;

        // Corrector.
        let nu = sigma * res.mu;
        let dir = match direction(p, &stct, &st, &nt, &res, nu, Some(&aff)) {
            Ok(d) => d,
            Err(()) => return finish(p, st, SolveStatus::NumErr, it),
        };
        let (ap, ad) = step_lengths(&st, &nt, &dir, opts.step_frac);
        if ap < conv(1e-10) && ad < conv(1e-10) {
            stall += 1;
            if stall >= 3 {
                return finish(p, st, SolveStatus::NumErr, it);
            }
        } else {
            stall = 0;
        }

        for k in 0..st.x.len() {
            st.x[k] += dir.dx[k].scale(ap);
            st.s[k] += dir.ds[k].scale(ad);
        }
        for i in 0..st.y.len() {
            st.y[i] += dir.dy[i] * ad;
        }
        for j in 0..st.u.len() {
            st.u[j] += dir.du[j] * ap;
        }
    }
    finish(p, st, SolveStatus::MaxIter, opts.max_iter)
}

/// Phase-I: maximize a uniform slack `t` so that `X_k - t I >= 0` stays
/// solvable, capped at `opts.t_max` through an extra 1x1 block.
pub fn phase1<T: Scalar>(p: &SdpProblem<T>, opts: &SolveOptions<T>) -> SdpSolution<T> {
    let nb = p.block_dims.len();
    let t_idx = p.free_count;
    let mut aug = SdpProblem::new(p.block_dims.clone(), p.free_count + 1);
    aug.block_dims.push(1); // cap slack block
    let cap_block = nb;

    for c in &p.constraints {
        let mut form = c.form.clone();
        let mut diag_sum = T::zero();
        for (e, v) in &form.block_terms {
            if e.row == e.col {
                diag_sum += *v;
            }
        }
        if diag_sum != T::zero() {
            form.free_terms.push((t_idx, diag_sum));
        }
        aug.add_constraint(form, c.rhs);
    }
    // t + s_cap = t_max.
    aug.add_constraint(
        LinearForm {
            block_terms: vec![(
                MatEntry {
                    block: cap_block,
                    row: 0,
                    col: 0,
                },
                T::one(),
            )],
            free_terms: vec![(t_idx, T::one())],
        },
        opts.t_max,
    );
    // minimize -t.
    aug.objective = LinearForm {
        block_terms: Vec::new(),
        free_terms: vec![(t_idx, -T::one())],
    };

    let inner = solve(&aug, opts);
    let t_star = inner.frees.get(t_idx).copied().unwrap_or_else(T::zero);

    // Map back: X_k = X~_k + t I.
    let mut blocks = Vec::with_capacity(nb);
    for k in 0..nb {
        let mut b = inner.blocks[k].clone();
        for i in 0..b.nrows() {
            b[(i, i)] += t_star;
        }
        blocks.push(b);
    }
    let status = match inner.status {
        SolveStatus::Optimal => {
            if t_star > conv(PHASE1_FEASIBLE_TOL) {
                SolveStatus::Feasible
            } else {
                SolveStatus::Infeasible
            }
        }
        other => other,
    };
    SdpSolution {
        status,
        blocks,
        frees: inner.frees[..p.free_count].to_vec(),
        y: inner.y[..p.constraints.len()].to_vec(),
        slacks: inner.slacks[..nb].to_vec(),
        primal_obj: inner.primal_obj,
        dual_obj: inner.dual_obj,
        gap: inner.gap,
        iterations: inner.iterations,
        phase1_slack: Some(t_star),
    }
}
