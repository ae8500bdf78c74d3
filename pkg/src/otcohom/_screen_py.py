"""Pure-Python subset-screen kernel.

Mirror of ``_screen_c.pyx``: identical operation order on IEEE doubles, so
both lanes return the same mask list bit-for-bit. Keep the two files in sync.

Per mask and generator the kernel forms the interval sum of log-magnitudes
and of principal arguments over the selected embeddings and keeps the mask
only if 0 (resp. a multiple of 2*pi) lies within the summed radius plus
tolerance plus a rigorous float-summation slack. The screen must never
reject a genuinely trivial character, so every approximation error is added
on the accepting side.

The per-generator shift arrays seed the two sums before any embedding is
added; a twisted run folds its character offset in through them. All-zero
shifts reproduce the unshifted screen exactly.
"""

TWO_PI = 6.283185307179586


def screen_range(
    n,
    r,
    tol,
    mag_mid,
    mag_rad,
    arg_mid,
    arg_rad,
    mag_shift_mid,
    mag_shift_rad,
    arg_shift_mid,
    arg_shift_rad,
    lo,
    hi,
):
    """Return masks in [lo, hi) passing the interval screen for all generators.

    The four data arrays are row-major length r*n doubles: entry j*n + i
    belongs to generator j, embedding i. The four shift arrays hold one
    double per generator.
    """
    out = []
    for mask in range(lo, hi):
        ok = True
        for j in range(r):
            base = j * n
            sm = mag_shift_mid[j]
            se = mag_shift_rad[j]
            sabs_m = abs(sm)
            sa = arg_shift_mid[j]
            sae = arg_shift_rad[j]
            sabs_a = abs(sa)
            cm = 1 if (sm != 0.0 or se != 0.0) else 0
            ca = 1 if (sa != 0.0 or sae != 0.0) else 0
            cnt = 0
            for i in range(n):
                if (mask >> i) & 1:
                    v = mag_mid[base + i]
                    sm += v
                    se += mag_rad[base + i]
                    sabs_m += abs(v)
                    w = arg_mid[base + i]
                    sa += w
                    sae += arg_rad[base + i]
                    sabs_a += abs(w)
                    cnt += 1
            slack_m = 1.1e-16 * (cnt + cm) * sabs_m
            if abs(sm) > se + slack_m + tol:
                ok = False
                break
            k = round(sa / TWO_PI)
            d = abs(sa - k * TWO_PI)
            slack_a = 1.1e-16 * (cnt + ca) * sabs_a + 1e-13
            if d > sae + slack_a + tol:
                ok = False
                break
        if ok:
            out.append(mask)
    return out
