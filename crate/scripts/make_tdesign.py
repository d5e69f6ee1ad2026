"""Compute an equal-weight spherical t-design with (t+1)^2 points.

Minimizes sum_{l=1..t} (2l+1) sum_{i,j} P_l(x_i . x_j) / N^2, which vanishes
exactly on t-designs, by L-BFGS in float64 starting from a Fibonacci lattice.

usage: python3 make_tdesign.py T OUT [START]

With START, the points of an existing file are only polished.
"""
import math
import sys

import torch

torch.set_default_dtype(torch.float64)


def fibonacci(n):
    k = torch.arange(n, dtype=torch.float64) + 0.5
    z = 1 - 2 * k / n
    phi = math.pi * (3 - math.sqrt(5)) * k
    r = torch.sqrt(1 - z * z)
    return torch.stack([r * torch.cos(phi), r * torch.sin(phi), z], 1)


def residual(x, t):
    u = x / x.norm(dim=1, keepdim=True)
    g = (u @ u.T).clamp(-1, 1)
    p_prev, p = torch.ones_like(g), g
    total = 3 * p.sum()
    for l in range(2, t + 1):
        p_prev, p = p, ((2 * l - 1) * g * p - (l - 1) * p_prev) / l
        total = total + (2 * l + 1) * p.sum()
    return total / x.shape[0] ** 2


def moments(x, t):
    """Equal-weight integrals of every real harmonic of degree 1..t (should be 0)."""
    u = x / x.norm(dim=1, keepdim=True)
    z = u[:, 2].clamp(-1, 1)
    s = torch.sqrt((u[:, 0] ** 2 + u[:, 1] ** 2).clamp_min(0))
    phi = torch.atan2(u[:, 1], u[:, 0])
    out = []
    pmm = torch.full_like(z, 1 / math.sqrt(4 * math.pi))
    for m in range(0, t + 1):
        if m > 0:
            pmm = math.sqrt((2 * m + 1) / (2 * m)) * s * pmm
        p_prev, p = None, pmm
        for l in range(m, t + 1):
            if l == m + 1:
                p_prev, p = p, math.sqrt(2 * m + 3) * z * p
            elif l > m + 1:
                a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
                b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
                p_prev, p = p, a * (z * p - b * p_prev)
            if l == 0:
                continue
            if m == 0:
                out.append(p.mean())
            else:
                out.append(math.sqrt(2) * (p * torch.cos(m * phi)).mean())
                out.append(math.sqrt(2) * (p * torch.sin(m * phi)).mean())
    return torch.stack(out)


def polish(x, t, steps=30):
    """Minimum-norm Gauss-Newton on the moment residuals."""
    shape = x.shape
    v = x.reshape(-1).clone()
    for _ in range(steps):
        r = moments(v.reshape(shape), t)
        if r.abs().max().item() < 1e-17:
            break
        j = torch.autograd.functional.jacobian(lambda y: moments(y.reshape(shape), t), v)
        v = v - torch.linalg.lstsq(j, r.unsqueeze(1), driver="gelsd").solution.squeeze(1)
    return v.reshape(shape)


def main():
    t = int(sys.argv[1])
    out = sys.argv[2]
    n = (t + 1) ** 2
    if len(sys.argv) > 3:
        x = torch.tensor([[float(v) for v in line.split()] for line in open(sys.argv[3])
                          if line.strip() and not line.startswith("#")])
        x = polish(x, t)
    else:
        x = optimize(fibonacci(n), t)
    write(x, t, out)


def optimize(x0, t):
    x = x0.clone().requires_grad_(True)
    opt = torch.optim.LBFGS([x], lr=1, max_iter=20000, tolerance_grad=1e-18,
                            tolerance_change=1e-30, history_size=50,
                            line_search_fn="strong_wolfe")

    def closure():
        opt.zero_grad()
        r = residual(x, t)
        r.backward()
        return r

    for _ in range(20):
        opt.step(closure)
    return polish(x.detach(), t)


def write(x, t, out):
    n = x.shape[0]
    r = moments(x, t).abs().max().item() * 4 * math.pi
    u = x / x.norm(dim=1, keepdim=True)
    with open(out, "w") as f:
        f.write(f"# equal-weight spherical {t}-design, {n} points, max integration error {r:.1e}\n")
        for p in u.tolist():
            f.write(f"{p[0]:.17e} {p[1]:.17e} {p[2]:.17e}\n")
    print(t, n, r)


if __name__ == "__main__":
    main()
