"""Matrix Market ingestion and canonical test-problem generators.

Generators return :class:`ProblemBundle` objects whose ``facts`` are either
verified against the dense oracle at construction (n <= 100) or derived
from exact closed forms; nothing is ever trusted from file metadata.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    ExactlySingular,
    OqeigError,
    ParseError,
    SingularMatrix,
)
from .linalg import (
    InnerProduct,
    Pencil,
    cholesky_spd,
    is_hermitian,
    lu_factorize,
    pencil_eigs_oracle,
)
from .quotients import check_self_adjoint, image_disc, rayleigh_quotient

_FIELDS = ("real", "complex", "pattern")
_SYMMETRIES = ("general", "symmetric", "hermitian", "skew-symmetric")


@dataclass(frozen=True)
class MatrixMarketHeader:
    object: str
    format: str
    field: str
    symmetry: str


def _parse_banner(line, lineno):
    parts = line.strip().lower().split()
    if len(parts) != 5 or parts[0] != "%%matrixmarket":
        raise ParseError("bad banner %r" % line.strip(), lineno)
    _, obj, fmt, fld, sym = parts
    if obj != "matrix":
        raise ParseError("unsupported object %r" % obj, lineno)
    if fmt not in ("coordinate", "array"):
        raise ParseError("unsupported format %r" % fmt, lineno)
    if fld == "pattern":
        raise ParseError("pattern unsupported", lineno)
    if fld not in _FIELDS:
        raise ParseError("unsupported field %r" % fld, lineno)
    if sym not in _SYMMETRIES:
        raise ParseError("unsupported symmetry %r" % sym, lineno)
    return MatrixMarketHeader(obj, fmt, fld, sym)


def _data_lines(path):
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.readlines()
    if not lines:
        raise ParseError("empty file", 1)
    header = _parse_banner(lines[0], 1)
    body = []
    for lineno, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        body.append((lineno, stripped))
    if not body:
        raise ParseError("missing size line", len(lines))
    return header, body


def _parse_value(tokens, fld, lineno):
    try:
        if fld == "complex":
            if len(tokens) != 2:
                raise ValueError
            return complex(float(tokens[0]), float(tokens[1]))
        if len(tokens) != 1:
            raise ValueError
        return complex(float(tokens[0]))
    except ValueError:
        raise ParseError("bad value %r" % (tokens,), lineno) from None


def read_matrix_market_triplets(path):
    """Raw coordinate content: (header, shape, rows, cols, values), 0-based.

    Symmetric storage is returned as stored (no mirroring), duplicates are
    not summed; use :func:`read_matrix_market` for the assembled matrix.
    """
    header, body = _data_lines(path)
    if header.format != "coordinate":
        raise ParseError("triplet reader needs coordinate format", body[0][0])
    lineno, size_line = body[0]
    parts = size_line.split()
    if len(parts) != 3:
        raise ParseError("coordinate size line needs rows cols nnz", lineno)
    try:
        nrows, ncols, nnz = (int(q) for q in parts)
    except ValueError:
        raise ParseError("bad size line %r" % size_line, lineno) from None
    if len(body) - 1 != nnz:
        raise ParseError("expected %d entries, found %d"
                         % (nnz, len(body) - 1), lineno)
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.complex128)
    for k, (entry_lineno, line) in enumerate(body[1:]):
        parts = line.split()
        if len(parts) < 3:
            raise ParseError("entry needs i j value", entry_lineno)
        try:
            i = int(parts[0])
            j = int(parts[1])
        except ValueError:
            raise ParseError("bad indices %r" % line, entry_lineno) from None
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise ParseError("index (%d, %d) outside %dx%d"
                             % (i, j, nrows, ncols), entry_lineno)
        rows[k] = i - 1
        cols[k] = j - 1
        vals[k] = _parse_value(parts[2:], header.field, entry_lineno)
    return header, (nrows, ncols), rows, cols, vals


def read_matrix_market(path, dense_cap=4000):
    """Dense matrix from a Matrix Market file (coordinate or array format).

    Symmetric/hermitian/skew storage is mirrored to the full matrix without
    doubling the diagonal; duplicate coordinate entries are summed.
    """
    header, body = _data_lines(path)
    if header.format == "coordinate":
        header, (nrows, ncols), rows, cols, vals = \
            read_matrix_market_triplets(path)
        if max(nrows, ncols) > dense_cap:
            raise OverflowError(
                "matrix is %dx%d, beyond the dense cap %d"
                % (nrows, ncols, dense_cap))
        a = np.zeros((nrows, ncols), dtype=np.complex128)
        np.add.at(a, (rows, cols), vals)
        if header.symmetry != "general":
            off = rows != cols
            if header.symmetry == "symmetric":
                np.add.at(a, (cols[off], rows[off]), vals[off])
            elif header.symmetry == "hermitian":
                np.add.at(a, (cols[off], rows[off]), np.conj(vals[off]))
            else:  # skew-symmetric
                np.add.at(a, (cols[off], rows[off]), -vals[off])
        return a

    lineno, size_line = body[0]
    parts = size_line.split()
    if len(parts) != 2:
        raise ParseError("array size line needs rows cols", lineno)
    nrows, ncols = int(parts[0]), int(parts[1])
    if max(nrows, ncols) > dense_cap:
        raise OverflowError("matrix is %dx%d, beyond the dense cap %d"
                            % (nrows, ncols, dense_cap))
    a = np.zeros((nrows, ncols), dtype=np.complex128)
    entries = body[1:]
    if header.symmetry == "general":
        coords = [(i, j) for j in range(ncols) for i in range(nrows)]
    else:
        if nrows != ncols:
            raise ParseError("symmetric array matrix must be square", lineno)
        coords = [(i, j) for j in range(ncols) for i in range(j, nrows)]
    if len(entries) != len(coords):
        raise ParseError("expected %d array entries, found %d"
                         % (len(coords), len(entries)), lineno)
    for (i, j), (entry_lineno, line) in zip(coords, entries):
        v = _parse_value(line.split(), header.field, entry_lineno)
        a[i, j] = v
        if i != j:
            if header.symmetry == "symmetric":
                a[j, i] = v
            elif header.symmetry == "hermitian":
                a[j, i] = np.conj(v)
            elif header.symmetry == "skew-symmetric":
                a[j, i] = -v
    return a


def _format_real(v):
    return repr(float(v))


def write_matrix_market(path, a, symmetry="general", comment=None):
    """Write a dense matrix as a coordinate Matrix Market file.

    Real input produces a ``real`` file whose values round-trip bit
    exactly; complex input produces a ``complex`` file.  ``symmetric`` (or
    ``hermitian``) storage writes the lower triangle only and is the
    caller's assertion about the matrix.
    """
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionMismatch("need a matrix, got shape %r" % (a.shape,))
    if symmetry not in _SYMMETRIES:
        raise ValueError("unknown symmetry %r" % symmetry)
    is_complex = np.iscomplexobj(a) and np.any(a.imag != 0)
    fld = "complex" if is_complex else "real"
    nrows, ncols = a.shape
    entries = []
    for i in range(nrows):
        for j in range(ncols):
            if symmetry != "general" and j > i:
                continue
            v = a[i, j]
            if v == 0:
                continue
            if is_complex:
                entries.append("%d %d %s %s" % (i + 1, j + 1,
                                                _format_real(v.real),
                                                _format_real(v.imag)))
            else:
                entries.append("%d %d %s" % (i + 1, j + 1,
                                             _format_real(np.real(v))))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%%%MatrixMarket matrix coordinate %s %s\n" % (fld, symmetry))
        if comment:
            for line in comment.splitlines():
                fh.write("%% %s\n" % line)
        fh.write("%d %d %d\n" % (nrows, ncols, len(entries)))
        fh.write("\n".join(entries))
        if entries:
            fh.write("\n")


@dataclass
class ProblemBundle:
    """A pencil plus the inner product recipe and verified known facts."""

    pencil: Pencil
    inner_product: InnerProduct
    p_recipe: str
    facts: dict = field(default_factory=dict)
    provenance: str = ""


def _verify_spectrum(bundle, tol=1e-9):
    """Oracle cross-check of generator facts; desk scale only."""
    if bundle.pencil.n > 100 or "spectrum" not in bundle.facts:
        return
    oracle = pencil_eigs_oracle(bundle.pencil, bundle.inner_product)
    want = np.asarray(bundle.facts["spectrum"], dtype=float)
    got = oracle.eigenvalues
    if len(want) != len(got):
        raise OqeigError("generator fact lists %d eigenvalues, oracle found %d"
                         % (len(want), len(got)))
    scale = max(1.0, float(np.abs(want).max()))
    if np.max(np.abs(np.sort(want) - got)) > tol * scale:
        raise OqeigError("generator spectrum disagrees with the oracle")


def gen_kungfood():
    """3x3 standard Hermitian benchmark with the all-ones trial vector."""
    m = np.array([[2.0, 1, 1], [1, 3, 1], [1, 1, 4]], dtype=np.complex128)
    pencil = Pencil(m, np.eye(3))
    p = InnerProduct.identity(3)
    trial = np.ones(3) / np.sqrt(3.0)
    oracle = pencil_eigs_oracle(pencil, p)
    center, radius = image_disc(pencil, p, trial)
    bundle = ProblemBundle(
        pencil=pencil, inner_product=p, p_recipe="identity",
        facts={
            "spectrum": oracle.eigenvalues.tolist(),
            "trial_vector": trial,
            "rq_at_trial": rayleigh_quotient(pencil, p, trial).real,
            "disc_radius_at_trial": radius,
            "positive_definite": bool(oracle.eigenvalues[0] > 0),
        },
        provenance="generator:kungfood")
    _verify_spectrum(bundle)
    return bundle


def gen_forward_shift(n, diag_perturbation=None):
    """Nilpotent forward shift (ones above the diagonal), optional diagonal.

    The all-ones vector has Rayleigh quotient 1 - 1/n against the pure
    shift; that identity is verified at construction.  With a distinct real
    diagonal added, the matrix is triangular and the diagonal is the exact
    spectrum.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    j = np.zeros((n, n), dtype=np.complex128)
    j[np.arange(n - 1), np.arange(1, n)] = 1.0
    p = InnerProduct.identity(n)
    ones = np.ones(n)
    rq = rayleigh_quotient(Pencil(j, np.eye(n)), p, ones).real
    if abs(rq - (1.0 - 1.0 / n)) > 1e-12:
        raise OqeigError("forward shift construction failed its rq check")
    if diag_perturbation is not None:
        e = np.asarray(diag_perturbation, dtype=float).reshape(-1)
        if e.shape[0] != n:
            raise DimensionMismatch("diagonal perturbation has length %d, "
                                    "need %d" % (e.shape[0], n))
        if len(np.unique(e)) != n:
            raise ValueError("diagonal perturbation entries must be distinct")
        m = j + np.diag(e)
        spectrum = np.sort(e).tolist()
    else:
        m = j
        spectrum = [0.0] * n
    pencil = Pencil(m, np.eye(n))
    center, radius = image_disc(pencil, p, ones)
    return ProblemBundle(
        pencil=pencil, inner_product=p, p_recipe="identity",
        facts={
            "spectrum": spectrum,
            "trial_vector": ones / np.sqrt(n),
            "rq_all_ones": 1.0 - 1.0 / n,
            "disc_radius_all_ones": radius,
            "disc_excludes_zero": bool(abs(center) > radius),
        },
        provenance="generator:forward-shift")


def gen_fd_laplacian(n):
    """Dirichlet finite-difference Laplacian on (0,1) with n subintervals.

    The pencil is ((n-1) x (n-1) tridiagonal, I); the bundled trial vector
    samples sqrt(30) t (1 - t) on the grid, scaled to unit discrete L2
    norm.  The exact spectrum 4 n^2 sin^2(k pi / (2n)) is kept as a fact.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    m_size = n - 1
    h = 1.0 / n
    main = 2.0 / (h * h)
    off = -1.0 / (h * h)
    m = np.zeros((m_size, m_size), dtype=np.complex128)
    np.fill_diagonal(m, main)
    idx = np.arange(m_size - 1)
    m[idx, idx + 1] = off
    m[idx + 1, idx] = off
    t = np.arange(1, n) * h
    x = np.sqrt(30.0) * t * (1.0 - t)
    x = x / np.sqrt(h * np.sum(x * x))
    k = np.arange(1, n)
    spectrum = (4.0 * n * n) * np.sin(k * np.pi / (2 * n)) ** 2
    bundle = ProblemBundle(
        pencil=Pencil(m, np.eye(m_size)),
        inner_product=InnerProduct.identity(m_size),
        p_recipe="identity",
        facts={
            "spectrum": np.sort(spectrum).tolist(),
            "trial_vector": x,
            "lambda1_continuum": np.pi ** 2,
            "grid_spacing": h,
        },
        provenance="generator:fd-laplacian")
    _verify_spectrum(bundle)
    return bundle


def gen_block_saddle(m11, m12, m22, n22):
    """Block pencil with a singular leading N block and its constructed P.

    M = [[M11, M12], [M12^H, M22]], N = blockdiag(0, N22); the inner
    product P = Z^H blockdiag(I, N22^{-1}) Z with Z = [[I, 0],
    [-M12^H M11^{-1}, I]] makes the pencil self-adjoint, which is verified
    at construction.
    """
    m11 = np.asarray(m11, dtype=np.complex128)
    m12 = np.asarray(m12, dtype=np.complex128)
    m22 = np.asarray(m22, dtype=np.complex128)
    n22 = np.asarray(n22, dtype=np.complex128)
    k = m11.shape[0]
    l = m22.shape[0]
    if m12.shape != (k, l):
        raise DimensionMismatch("M12 must be %dx%d" % (k, l))
    if not (is_hermitian(m11) and is_hermitian(m22)):
        raise OqeigError("M11 and M22 must be Hermitian")
    try:
        lu = lu_factorize(m11)
    except ExactlySingular as exc:
        raise SingularMatrix("M11 is singular") from exc
    if lu.near_singular:
        raise SingularMatrix("M11 is numerically singular")
    n22_factor = cholesky_spd(n22)  # also proves N22 is SPD
    n = k + l
    m = np.zeros((n, n), dtype=np.complex128)
    m[:k, :k] = m11
    m[:k, k:] = m12
    m[k:, :k] = m12.conj().T
    m[k:, k:] = m22
    nmat = np.zeros((n, n), dtype=np.complex128)
    nmat[k:, k:] = n22
    w = lu.solve(m12)  # M11^{-1} M12
    z = np.eye(n, dtype=np.complex128)
    z[k:, :k] = -w.conj().T
    d = np.eye(n, dtype=np.complex128)
    d[k:, k:] = n22_factor.solve(np.eye(l, dtype=np.complex128))
    pmat = z.conj().T @ d @ z
    pmat = (pmat + pmat.conj().T) / 2.0
    p = InnerProduct.from_matrix(pmat)
    pencil = Pencil(m, nmat)
    check = check_self_adjoint(pencil, p, tol=1e-10)
    if not check.passed:
        raise OqeigError("block construction failed the self-adjointness "
                         "check: residual %g" % check.residual)
    return ProblemBundle(
        pencil=pencil, inner_product=p, p_recipe="explicit",
        facts={"self_adjoint_residual": check.residual, "block_sizes": (k, l)},
        provenance="generator:block-saddle")


def _gram_schmidt_in_metric(c, g):
    """P-orthonormalize the columns of c in the metric given by dense g."""
    n, k = c.shape
    q = np.zeros((n, k), dtype=np.complex128)
    for j in range(k):
        v = c[:, j].copy()
        for _ in range(2):
            for i in range(j):
                v -= (q[:, i].conj() @ (g @ v)) * q[:, i]
        nrm = np.sqrt((v.conj() @ (g @ v)).real)
        if nrm <= 1e-12:
            raise SingularMatrix("metric Gram-Schmidt broke down")
        q[:, j] = v / nrm
    return q


def _random_spd(rng, n):
    w = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    w /= np.sqrt(2.0 * n)
    return w @ w.conj().T + 0.5 * np.eye(n)


def gen_random_selfadjoint(seed, n, spectrum, p_mode="random",
                           n_mode="random"):
    """Self-adjoint pencil with a prescribed real spectrum.

    Draws P (SPD) and N (invertible), picks a random basis V orthonormal in
    the N^H P N metric, and sets M = N V diag(spectrum) V^H (N^H P N); the
    eigenvalues are then exactly the prescribed ones with eigenvector
    matrix V.  Oracle-verified at construction for n <= 100.
    """
    spectrum = np.sort(np.asarray(spectrum, dtype=float).reshape(-1))
    if spectrum.shape[0] != n:
        raise DimensionMismatch("spectrum needs %d values" % n)
    rng = np.random.default_rng(seed)
    if p_mode == "identity":
        p = InnerProduct.identity(n)
        pmat = np.eye(n, dtype=np.complex128)
        p_recipe = "identity"
    else:
        pmat = _random_spd(rng, n)
        p = InnerProduct.from_matrix(pmat)
        p_recipe = "explicit"
    if n_mode == "identity":
        nmat = np.eye(n, dtype=np.complex128)
    else:
        nmat = (rng.standard_normal((n, n))
                + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0 * n)
        nmat += 3.0 * np.eye(n)
    g = nmat.conj().T @ pmat @ nmat
    c = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    v = _gram_schmidt_in_metric(c, g)
    m = nmat @ (v * spectrum) @ (v.conj().T @ g)
    bundle = ProblemBundle(
        pencil=Pencil(m, nmat), inner_product=p, p_recipe=p_recipe,
        facts={"spectrum": spectrum.tolist(), "eigenvectors": v},
        provenance="generator:random-selfadjoint:%d" % seed)
    _verify_spectrum(bundle)
    return bundle


def gen_two_bound_states(n=60, gap_params=None, seed=0, rotate=True):
    """Two isolated eigenvalues below a dense synthetic band.

    Stand-in for waveguide-type problems whose discrete spectrum sits just
    under a (discretized) continuous one: the second eigenvalue is placed
    ``band_gap`` below the band edge (1e-4 scale), and the whole diagonal
    model is rotated by a random P-unitary basis (``rotate=False`` keeps
    the plain diagonal pencil with P = I).
    """
    params = {"lambda1": 0.5, "lambda2": 0.95, "band_gap": 8e-5,
              "band_top": 12.0}
    if gap_params:
        params.update(gap_params)
    lam1 = float(params["lambda1"])
    lam2 = float(params["lambda2"])
    gap = float(params["band_gap"])
    top = float(params["band_top"])
    if not (lam1 < lam2 and gap > 0 and top > lam2 + gap):
        raise ValueError("inconsistent gap parameters %r" % (params,))
    if gap > 1e-4:
        raise ValueError("band_gap must be at most 1e-4")
    if n < 4:
        raise ValueError("need n >= 4")
    rng = np.random.default_rng(seed)
    band = np.linspace(lam2 + gap, top, n - 2)
    jitter = (band[1] - band[0]) * 0.3
    band[1:] += rng.uniform(-jitter, jitter, size=n - 3)
    spectrum = np.concatenate(([lam1, lam2], np.sort(band)))
    if rotate:
        pmat = _random_spd(rng, n)
        p = InnerProduct.from_matrix(pmat)
        c = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        v = _gram_schmidt_in_metric(c, pmat)
        m = (v * spectrum) @ (v.conj().T @ pmat)
    else:
        p = InnerProduct.identity(n)
        v = np.eye(n, dtype=np.complex128)
        m = np.diag(spectrum.astype(np.complex128))
    bundle = ProblemBundle(
        pencil=Pencil(m, np.eye(n)), inner_product=p, p_recipe="explicit",
        facts={
            "spectrum": spectrum.tolist(),
            "lambda1": lam1,
            "lambda2": lam2,
            "band_edge": float(spectrum[2]),
            "eigenvectors": v,
        },
        provenance="generator:two-bound-states:%d" % seed)
    _verify_spectrum(bundle)
    return bundle
