# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False, language_level=3
"""Compiled Rusanov flux-divergence kernels (piecewise-constant states).

Twin of the numpy path in ``kernels_numpy``; selected at import by
``kernels`` when available.  Only the hot first-order sweep lives here, the
MUSCL variant stays in numpy.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt

cnp.import_array()


cdef inline double _pressure(double rho, double gamma) noexcept nogil:
    if rho <= 0.0:
        return 0.0
    if gamma == 2.0:
        return rho * rho
    return pow(rho, gamma)


cdef inline double _sound(double rho, double gamma) noexcept nogil:
    if rho <= 0.0:
        return 0.0
    if gamma == 2.0:
        return sqrt(2.0 * rho)
    return sqrt(gamma * pow(rho, gamma - 1.0))


cdef inline double _alpha(double rl, double rr, double ul, double ur,
                          double gamma) noexcept nogil:
    # max signal speed plus the local velocity jump; the shear term cures the
    # frozen-slope stagnation glitch and keeps the flux an admissible
    # (more dissipative) Rusanov flux.  Mirrors kernels_numpy.face_alpha.
    cdef double a = fabs(ul) + _sound(rl, gamma)
    cdef double b = fabs(ur) + _sound(rr, gamma)
    if b > a:
        a = b
    return a + fabs(ur - ul)


def rhs_1d(double[::1] rho, double[::1] mx, double gamma, double dx,
           bint periodic, double floor, double[::1] drho, double[::1] dmx):
    cdef Py_ssize_t n = rho.shape[0]
    cdef Py_ssize_t f, L, R
    cdef double rl, rr, ml, mr, ul, ur, a, frho, fm, inv = 1.0 / dx
    with nogil:
        for f in range(n):
            drho[f] = 0.0
            dmx[f] = 0.0
        for f in range(n + 1):
            L = f - 1
            R = f
            if periodic:
                if L < 0:
                    L = n - 1
                if R > n - 1:
                    R = 0
            else:
                if L < 0:
                    L = 0
                if R > n - 1:
                    R = n - 1
            rl = rho[L]; rr = rho[R]
            ml = mx[L]; mr = mx[R]
            ul = ml / (rl if rl > floor else floor)
            ur = mr / (rr if rr > floor else floor)
            a = _alpha(rl, rr, ul, ur, gamma)
            frho = 0.5 * (ml + mr) - 0.5 * a * (rr - rl)
            fm = 0.5 * (ml * ul + mr * ur + _pressure(rl, gamma) + _pressure(rr, gamma)) \
                - 0.5 * a * (mr - ml)
            if f >= 1:
                drho[f - 1] -= frho * inv
                dmx[f - 1] -= fm * inv
            if f <= n - 1:
                drho[f] += frho * inv
                dmx[f] += fm * inv


def rhs_2d(double[:, ::1] rho, double[:, ::1] mx, double[:, ::1] my,
           double gamma, double dx, double dy, bint per_x, bint per_y,
           double floor, double[:, ::1] drho, double[:, ::1] dmx,
           double[:, ::1] dmy):
    cdef Py_ssize_t nx = rho.shape[0], ny = rho.shape[1]
    cdef Py_ssize_t i, j, f, L, R
    cdef double rl, rr, mnl, mnr, mtl, mtr, ul, ur, a
    cdef double frho, fmn, fmt, invx = 1.0 / dx, invy = 1.0 / dy
    with nogil:
        for i in range(nx):
            for j in range(ny):
                drho[i, j] = 0.0
                dmx[i, j] = 0.0
                dmy[i, j] = 0.0
        # x-sweep
        for j in range(ny):
            for f in range(nx + 1):
                L = f - 1; R = f
                if per_x:
                    if L < 0: L = nx - 1
                    if R > nx - 1: R = 0
                else:
                    if L < 0: L = 0
                    if R > nx - 1: R = nx - 1
                rl = rho[L, j]; rr = rho[R, j]
                mnl = mx[L, j]; mnr = mx[R, j]
                mtl = my[L, j]; mtr = my[R, j]
                ul = mnl / (rl if rl > floor else floor)
                ur = mnr / (rr if rr > floor else floor)
                a = _alpha(rl, rr, ul, ur, gamma)
                frho = 0.5 * (mnl + mnr) - 0.5 * a * (rr - rl)
                fmn = 0.5 * (mnl * ul + mnr * ur + _pressure(rl, gamma) + _pressure(rr, gamma)) \
                    - 0.5 * a * (mnr - mnl)
                fmt = 0.5 * (mtl * ul + mtr * ur) - 0.5 * a * (mtr - mtl)
                if f >= 1:
                    drho[f - 1, j] -= frho * invx
                    dmx[f - 1, j] -= fmn * invx
                    dmy[f - 1, j] -= fmt * invx
                if f <= nx - 1:
                    drho[f, j] += frho * invx
                    dmx[f, j] += fmn * invx
                    dmy[f, j] += fmt * invx
        # y-sweep
        for i in range(nx):
            for f in range(ny + 1):
                L = f - 1; R = f
                if per_y:
                    if L < 0: L = ny - 1
                    if R > ny - 1: R = 0
                else:
                    if L < 0: L = 0
                    if R > ny - 1: R = ny - 1
                rl = rho[i, L]; rr = rho[i, R]
                mnl = my[i, L]; mnr = my[i, R]
                mtl = mx[i, L]; mtr = mx[i, R]
                ul = mnl / (rl if rl > floor else floor)
                ur = mnr / (rr if rr > floor else floor)
                a = _alpha(rl, rr, ul, ur, gamma)
                frho = 0.5 * (mnl + mnr) - 0.5 * a * (rr - rl)
                fmn = 0.5 * (mnl * ul + mnr * ur + _pressure(rl, gamma) + _pressure(rr, gamma)) \
                    - 0.5 * a * (mnr - mnl)
                fmt = 0.5 * (mtl * ul + mtr * ur) - 0.5 * a * (mtr - mtl)
                if f >= 1:
                    drho[i, f - 1] -= frho * invy
                    dmy[i, f - 1] -= fmn * invy
                    dmx[i, f - 1] -= fmt * invy
                if f <= ny - 1:
                    drho[i, f] += frho * invy
                    dmy[i, f] += fmn * invy
                    dmx[i, f] += fmt * invy


def rhs_3d(double[:, :, ::1] rho, double[:, :, ::1] mx, double[:, :, ::1] my,
           double[:, :, ::1] mz, double gamma, double dx, double dy, double dz,
           bint per_x, bint per_y, bint per_z, double floor,
           double[:, :, ::1] drho, double[:, :, ::1] dmx,
           double[:, :, ::1] dmy, double[:, :, ::1] dmz):
    cdef Py_ssize_t nx = rho.shape[0], ny = rho.shape[1], nz = rho.shape[2]
    cdef Py_ssize_t i, j, k, f, L, R
    cdef double rl, rr, mnl, mnr, t1l, t1r, t2l, t2r, ul, ur, a
    cdef double frho, fmn, ft1, ft2
    cdef double invx = 1.0 / dx, invy = 1.0 / dy, invz = 1.0 / dz
    with nogil:
        for i in range(nx):
            for j in range(ny):
                for k in range(nz):
                    drho[i, j, k] = 0.0
                    dmx[i, j, k] = 0.0
                    dmy[i, j, k] = 0.0
                    dmz[i, j, k] = 0.0
        # x-sweep
        for j in range(ny):
            for k in range(nz):
                for f in range(nx + 1):
                    L = f - 1; R = f
                    if per_x:
                        if L < 0: L = nx - 1
                        if R > nx - 1: R = 0
                    else:
                        if L < 0: L = 0
                        if R > nx - 1: R = nx - 1
                    rl = rho[L, j, k]; rr = rho[R, j, k]
                    mnl = mx[L, j, k]; mnr = mx[R, j, k]
                    t1l = my[L, j, k]; t1r = my[R, j, k]
                    t2l = mz[L, j, k]; t2r = mz[R, j, k]
                    ul = mnl / (rl if rl > floor else floor)
                    ur = mnr / (rr if rr > floor else floor)
                    a = _alpha(rl, rr, ul, ur, gamma)
                    frho = 0.5 * (mnl + mnr) - 0.5 * a * (rr - rl)
                    fmn = 0.5 * (mnl * ul + mnr * ur + _pressure(rl, gamma) + _pressure(rr, gamma)) \
                        - 0.5 * a * (mnr - mnl)
                    ft1 = 0.5 * (t1l * ul + t1r * ur) - 0.5 * a * (t1r - t1l)
                    ft2 = 0.5 * (t2l * ul + t2r * ur) - 0.5 * a * (t2r - t2l)
                    if f >= 1:
                        drho[f - 1, j, k] -= frho * invx
                        dmx[f - 1, j, k] -= fmn * invx
                        dmy[f - 1, j, k] -= ft1 * invx
                        dmz[f - 1, j, k] -= ft2 * invx
                    if f <= nx - 1:
                        drho[f, j, k] += frho * invx
                        dmx[f, j, k] += fmn * invx
                        dmy[f, j, k] += ft1 * invx
                        dmz[f, j, k] += ft2 * invx
        # y-sweep
        for i in range(nx):
            for k in range(nz):
                for f in range(ny + 1):
                    L = f - 1; R = f
                    if per_y:
                        if L < 0: L = ny - 1
                        if R > ny - 1: R = 0
                    else:
                        if L < 0: L = 0
                        if R > ny - 1: R = ny - 1
                    rl = rho[i, L, k]; rr = rho[i, R, k]
                    mnl = my[i, L, k]; mnr = my[i, R, k]
                    t1l = mx[i, L, k]; t1r = mx[i, R, k]
                    t2l = mz[i, L, k]; t2r = mz[i, R, k]
                    ul = mnl / (rl if rl > floor else floor)
                    ur = mnr / (rr if rr > floor else floor)
                    a = _alpha(rl, rr, ul, ur, gamma)
                    frho = 0.5 * (mnl + mnr) - 0.5 * a * (rr - rl)
                    fmn = 0.5 * (mnl * ul + mnr * ur + _pressure(rl, gamma) + _pressure(rr, gamma)) \
                        - 0.5 * a * (mnr - mnl)
                    ft1 = 0.5 * (t1l * ul + t1r * ur) - 0.5 * a * (t1r - t1l)
                    ft2 = 0.5 * (t2l * ul + t2r * ur) - 0.5 * a * (t2r - t2l)
                    if f >= 1:
                        drho[i, f - 1, k] -= frho * invy
                        dmy[i, f - 1, k] -= fmn * invy
                        dmx[i, f - 1, k] -= ft1 * invy
                        dmz[i, f - 1, k] -= ft2 * invy
                    if f <= ny - 1:
                        drho[i, f, k] += frho * invy
                        dmy[i, f, k] += fmn * invy
                        dmx[i, f, k] += ft1 * invy
                        dmz[i, f, k] += ft2 * invy
        # z-sweep
        for i in range(nx):
            for j in range(ny):
                for f in range(nz + 1):
                    L = f - 1; R = f
                    if per_z:
                        if L < 0: L = nz - 1
                        if R > nz - 1: R = 0
                    else:
                        if L < 0: L = 0
                        if R > nz - 1: R = nz - 1
                    rl = rho[i, j, L]; rr = rho[i, j, R]
                    mnl = mz[i, j, L]; mnr = mz[i, j, R]
                    t1l = mx[i, j, L]; t1r = mx[i, j, R]
                    t2l = my[i, j, L]; t2r = my[i, j, R]
                    ul = mnl / (rl if rl > floor else floor)
                    ur = mnr / (rr if rr > floor else floor)
                    a = _alpha(rl, rr, ul, ur, gamma)
                    frho = 0.5 * (mnl + mnr) - 0.5 * a * (rr - rl)
                    fmn = 0.5 * (mnl * ul + mnr * ur + _pressure(rl, gamma) + _pressure(rr, gamma)) \
                        - 0.5 * a * (mnr - mnl)
                    ft1 = 0.5 * (t1l * ul + t1r * ur) - 0.5 * a * (t1r - t1l)
                    ft2 = 0.5 * (t2l * ul + t2r * ur) - 0.5 * a * (t2r - t2l)
                    if f >= 1:
                        drho[i, j, f - 1] -= frho * invz
                        dmz[i, j, f - 1] -= fmn * invz
                        dmx[i, j, f - 1] -= ft1 * invz
                        dmy[i, j, f - 1] -= ft2 * invz
                    if f <= nz - 1:
                        drho[i, j, f] += frho * invz
                        dmz[i, j, f] += fmn * invz
                        dmx[i, j, f] += ft1 * invz
                        dmy[i, j, f] += ft2 * invz
