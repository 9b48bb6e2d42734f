"""Adam on f(w) = 0.5*sum(a_i*(w_i-c_i)^2) from w = 0, default hyper-parameters.

Writes one line per step: t, w_0, w_1.
"""
alpha, b1, b2, eps = 1e-3, 0.9, 0.999, 1e-8
a = [1.0, 10.0]
c = [3.0, -2.0]
w = [0.0, 0.0]
m = [0.0, 0.0]
v = [0.0, 0.0]
print("t,w0,w1")
for t in range(1, 201):
    for i in range(2):
        g = a[i] * (w[i] - c[i])
        m[i] = b1 * m[i] + (1 - b1) * g
        v[i] = b2 * v[i] + (1 - b2) * g * g
        mh = m[i] / (1 - b1 ** t)
        vh = v[i] / (1 - b2 ** t)
        w[i] = w[i] - alpha * mh / (vh ** 0.5 + eps)
    print(f"{t},{w[0]!r},{w[1]!r}")
