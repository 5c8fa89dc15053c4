# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Dormand-Prince 8(5,3) stepper for the three-level amplitude equations.

State layout is (a~, b1~, b2~), the interaction-picture amplitudes obeying

    a~'   = -i (g1 e^{i phi1} b1~ + g2 e^{i phi2} b2~)
    bj~'  = -i conj(gj) e^{-i phi_j} a~,        phi_j = k^2 ln|tau| - beta_j tau^2 / 2.

The right-hand side is bounded but oscillates at frequency ~ |beta| tau, so a
single scattering run takes 1e4-1e6 accepted steps.  Sweeps and verification
batches spend essentially all their time here, which is why this loop is
compiled; :mod:`lzc3.propagator` falls back to SciPy's implementation of the
same embedded pair when the extension is unavailable.
"""

from libc.math cimport cos, fabs, fmax, fmin, log, pow, sin, sqrt

import numpy as np

# Dormand-Prince 8(5,3) tableau (Hairer, Norsett & Wanner, "Solving ODEs I").
cdef double[12] DP_C = [0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0]
cdef double[12][12] DP_A = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0],
    [0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0],
    [-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0],
    [2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0],
]
cdef double[12] DP_B = [0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259]
cdef double[13] DP_E3 = [-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082, 0.0]
cdef double[13] DP_E5 = [0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294, 0.0]

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double ERR_EXPONENT = -1.0 / 8.0

# status codes returned to the Python layer
STATUS_OK = 0
STATUS_MAX_STEPS = 1
STATUS_STEP_UNDERFLOW = 2

ctypedef struct Sys:
    double k2
    double complex g1
    double complex g2
    double beta1
    double beta2


cdef inline void rhs(double tau, double complex* y, double complex* f, Sys* s) noexcept nogil:
    cdef double lg = 0.0
    cdef double ph1, ph2
    if s.k2 != 0.0:
        # at k^2 == 0 the log term is absent and tau == 0 is regular
        lg = s.k2 * log(fabs(tau))
    ph1 = lg - 0.5 * s.beta1 * tau * tau
    ph2 = lg - 0.5 * s.beta2 * tau * tau
    cdef double complex e1 = cos(ph1) + 1j * sin(ph1)
    cdef double complex e2 = cos(ph2) + 1j * sin(ph2)
    f[0] = -1j * (s.g1 * e1 * y[1] + s.g2 * e2 * y[2])
    f[1] = -1j * s.g1.conjugate() * e1.conjugate() * y[0]
    f[2] = -1j * s.g2.conjugate() * e2.conjugate() * y[0]


cdef inline double rms3(double complex* v, double* scale) noexcept nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(3):
        acc += (v[i].real * v[i].real + v[i].imag * v[i].imag) / (scale[i] * scale[i])
    return sqrt(acc / 3.0)


cdef double initial_step(double t0, double complex* y0, double complex* f0,
                         double t_span, double rtol, double atol, Sys* s) noexcept nogil:
    cdef double scale[3]
    cdef double complex y1[3]
    cdef double complex f1[3]
    cdef double complex df[3]
    cdef double d0, d1, d2, h0, h1
    cdef int i
    for i in range(3):
        scale[i] = atol + abs(y0[i]) * rtol
    d0 = rms3(y0, scale)
    d1 = rms3(f0, scale)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = fmin(h0, 0.5 * t_span)
    for i in range(3):
        y1[i] = y0[i] + h0 * f0[i]
    rhs(t0 + h0, y1, f1, s)
    for i in range(3):
        df[i] = f1[i] - f0[i]
    d2 = rms3(df, scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = fmax(1e-6, h0 * 1e-3)
    else:
        h1 = pow(0.01 / fmax(d1, d2), 1.0 / 9.0)
    return fmin(fmin(100.0 * h0, h1), t_span)


def integrate(double k2, double complex g1, double complex g2,
              double beta1, double beta2,
              double t0, double t1, double complex[::1] y0,
              double rtol, double atol, long max_steps):
    """Integrate the amplitude equations from ``t0`` to ``t1`` (``t0 < t1``).

    Returns ``(y_final, n_accepted_steps, status)`` where status is one of the
    ``STATUS_*`` codes.  The caller owns tolerance/step-budget policy.
    """
    if not t1 > t0:
        raise ValueError("integrate requires t0 < t1")

    cdef Sys s
    s.k2 = k2
    s.g1 = g1
    s.g2 = g2
    s.beta1 = beta1
    s.beta2 = beta2

    cdef double complex y[3]
    cdef double complex y_new[3]
    cdef double complex y_stage[3]
    cdef double complex K[13][3]
    cdef double complex acc
    cdef double scale[3]
    cdef double t = t0
    cdef double h_abs, h, t_new, err5n2, err3n2, denom, err_norm, factor
    cdef double e5r, e5i, e3r, e3i
    cdef long nsteps = 0
    cdef int i, j, st
    cdef bint rejected = False
    cdef int status = 0

    out = np.empty(3, dtype=np.complex128)
    cdef double complex[::1] out_mv = out

    for i in range(3):
        y[i] = y0[i]

    with nogil:
        rhs(t, y, &K[0][0], &s)
        h_abs = initial_step(t, y, &K[0][0], t1 - t0, rtol, atol, &s)

        while t < t1:
            if nsteps >= max_steps:
                status = 1
                break
            if h_abs < 1e-14 * fmax(fabs(t0), fabs(t1)):
                status = 2
                break
            h = fmin(h_abs, t1 - t)
            t_new = t + h

            for st in range(1, 12):
                for i in range(3):
                    acc = 0
                    for j in range(st):
                        if DP_A[st][j] != 0.0:
                            acc = acc + DP_A[st][j] * K[j][i]
                    y_stage[i] = y[i] + h * acc
                rhs(t + DP_C[st] * h, y_stage, &K[st][0], &s)

            for i in range(3):
                acc = 0
                for j in range(12):
                    if DP_B[j] != 0.0:
                        acc = acc + DP_B[j] * K[j][i]
                y_new[i] = y[i] + h * acc
            rhs(t_new, y_new, &K[12][0], &s)

            for i in range(3):
                scale[i] = atol + fmax(abs(y[i]), abs(y_new[i])) * rtol

            # combined 5th/3rd order error estimate of the 8(5,3) pair
            err5n2 = 0.0
            err3n2 = 0.0
            for i in range(3):
                e5r = 0.0
                e5i = 0.0
                e3r = 0.0
                e3i = 0.0
                for j in range(13):
                    if DP_E5[j] != 0.0:
                        e5r += DP_E5[j] * K[j][i].real
                        e5i += DP_E5[j] * K[j][i].imag
                    if DP_E3[j] != 0.0:
                        e3r += DP_E3[j] * K[j][i].real
                        e3i += DP_E3[j] * K[j][i].imag
                err5n2 += (e5r * e5r + e5i * e5i) / (scale[i] * scale[i])
                err3n2 += (e3r * e3r + e3i * e3i) / (scale[i] * scale[i])

            if err5n2 == 0.0 and err3n2 == 0.0:
                err_norm = 0.0
            else:
                denom = err5n2 + 0.01 * err3n2
                err_norm = fabs(h) * err5n2 / sqrt(denom * 3.0)

            if err_norm < 1.0:
                if err_norm == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = fmin(MAX_FACTOR, SAFETY * pow(err_norm, ERR_EXPONENT))
                if rejected:
                    factor = fmin(1.0, factor)
                rejected = False
                t = t_new
                for i in range(3):
                    y[i] = y_new[i]
                    K[0][i] = K[12][i]
                h_abs = h * factor
                nsteps += 1
            else:
                rejected = True
                h_abs = h * fmax(MIN_FACTOR, SAFETY * pow(err_norm, ERR_EXPONENT))

    for i in range(3):
        out_mv[i] = y[i]
    return out, nsteps, status
