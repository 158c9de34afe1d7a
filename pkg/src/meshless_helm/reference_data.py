"""Published reference tables for the worked examples.

Each entry maps a table id to its row labels, column labels and printed
values (row-major).  Values are copied as printed, so ``bench`` output can be
diffed against them side by side.
"""

HEAT_POINTS = ((-0.01, 0.07), (-0.01, 0.04), (-0.01, 0.01),
               (-0.01, -0.01), (-0.01, -0.04), (-0.01, -0.07))
WAVE_POINTS = ((0.14, 0.35), (0.29, 0.35), (0.43, 0.35),
               (0.57, 0.35), (0.71, 0.35), (0.86, 0.35))
STAR_INTERIOR = ((0.0, 0.0), (-0.5, -0.5), (0.5, 0.5))
BALL_INTERIOR = ((0.26, 0.0, -0.15), (0.26, 0.0, 0.15), (0.0, 0.0, 0.3))

_HEAT_COLUMNS = ("true", "numerical", "error")

TABLES = {
    # homogeneous problem on the star domain; rows a, columns N
    "T1": {"title": "boundary max error", "rows": ("a", (5, 6, 7)), "cols": ("N", (30, 40, 50)),
           "values": ((5.7834e-08, 1.7858e-04, 1.8384e-05),
                      (6.4251e-08, 1.5524e-04, 3.0641e-04),
                      (7.6068e-08, 3.2974e-04, 2.1189e-04))},
    "T2": {"title": "error at (0,0)", "rows": ("a", (5, 6, 7)), "cols": ("N", (30, 40, 50)),
           "values": ((1.2697e-09, 3.7395e-05, 2.0255e-06),
                      (3.6321e-09, 2.6167e-05, 4.5180e-06),
                      (7.2834e-09, 3.8662e-05, 7.6944e-06))},
    "T3": {"title": "error at (-0.5,-0.5)", "rows": ("a", (5, 6, 7)), "cols": ("N", (30, 40, 50)),
           "values": ((3.3531e-09, 1.4115e-05, 3.6029e-06),
                      (1.0839e-08, 5.9511e-05, 3.6455e-05),
                      (2.6621e-09, 8.7411e-05, 6.5502e-06))},
    "T4": {"title": "error at (0.5,0.5)", "rows": ("a", (5, 6, 7)), "cols": ("N", (30, 40, 50)),
           "values": ((1.8178e-10, 7.0093e-05, 5.2808e-06),
                      (1.2718e-09, 1.5910e-05, 9.0011e-05),
                      (1.1732e-08, 3.2128e-06, 6.7437e-05))},
    # inhomogeneous problem on the unit disk; max error over 450 points
    "T5": {"title": "gaussian rbf, n=14, delta=0.2", "rows": ("c", (3.77, 3.8, 3.82)),
           "cols": ("N", (30, 40, 50)),
           "values": ((9.8458e-04, 9.0813e-04, 9.4048e-04),
                      (6.8730e-04, 6.2337e-04, 6.6379e-04),
                      (4.9107e-04, 4.3522e-04, 4.8256e-04))},
    "T6": {"title": "gaussian rbf, n=24, delta=0.1", "rows": ("c", (4.0, 4.2, 4.4)),
           "cols": ("N", (30, 40, 50)),
           "values": ((1.9549e-03, 1.9259e-03, 1.9475e-03),
                      (9.4343e-04, 8.7272e-04, 9.5018e-04),
                      (2.5448e-03, 2.4606e-03, 2.5349e-03))},
    "T7": {"title": "bump rbf, delta=0.2", "rows": ("n", (16, 30, 50)),
           "cols": ("N", (30, 40, 50)),
           "values": ((1.4661e-03, 1.4744e-03, 1.4839e-03),
                      (2.3721e-03, 2.3513e-03, 2.3640e-03),
                      (9.7023e-04, 9.7664e-04, 1.0239e-03))},
    # inhomogeneous problem on the unit ball; rows n, columns N
    "T8": {"title": "boundary max error", "rows": ("n", (5, 10, 20)),
           "cols": ("N", (155, 176, 203)),
           "values": ((8.8797e-04, 5.8049e-04, 1.0279e-03),
                      (5.7091e-04, 3.0869e-04, 8.3734e-05),
                      (4.8601e-04, 2.5440e-04, 1.0339e-04))},
    "T9": {"title": "error at (0.26,0,-0.15)", "rows": ("n", (5, 10, 20)),
           "cols": ("N", (155, 176, 203)),
           "values": ((1.3216e-04, 2.9446e-05, 1.2316e-04),
                      (7.63554e-05, 1.2761e-06, 1.3956e-05),
                      (3.4145e-05, 1.5425e-05, 1.3176e-05))},
    "T10": {"title": "error at (0.26,0,0.15)", "rows": ("n", (5, 10, 20)),
            "cols": ("N", (155, 176, 203)),
            "values": ((1.5254e-04, 1.9090e-05, 1.2736e-04),
                       (1.0593e-04, 8.1219e-06, 2.2554e-05),
                       (6.2453e-05, 2.6541e-05, 2.2394e-05))},
    "T11": {"title": "error at (0,0,0.3)", "rows": ("n", (5, 10, 20)),
            "cols": ("N", (155, 176, 203)),
            "values": ((8.2412e-05, 4.6458e-05, 5.4867e-05),
                       (6.4257e-05, 2.32639e-05, 1.3766e-05),
                       (5.10585e-05, 2.5940e-05, 1.3930e-05))},
    # diffusion by Laplace transform; rows points, columns true/numerical/error
    "T13": {"title": "Laplace transform, ns=10", "rows": ("point", HEAT_POINTS),
            "cols": ("quantity", _HEAT_COLUMNS),
            "values": ((0.7014, 0.7521, 0.0507), (0.7682, 0.8034, 0.0351),
                       (0.8008, 0.8026, 1.7366e-03), (0.8008, 0.8001, 7.3928e-04),
                       (0.7682, 0.7966, 0.0283), (0.7014, 0.7929, 0.0915))},
    "T14": {"title": "Laplace transform, ns=18", "rows": ("point", HEAT_POINTS),
            "cols": ("quantity", _HEAT_COLUMNS),
            "values": ((0.7014, 0.7921, 0.0906), (0.7682, 0.7934, 0.0251),
                       (0.8008, 0.7926, 8.2685e-03), (0.8008, 0.7901, 0.0107),
                       (0.7682, 0.7866, 0.0183), (0.7014, 0.7829, 0.0814))},
    # diffusion by backward Euler
    "T15": {"title": "time stepping, M=10", "rows": ("point", HEAT_POINTS),
            "cols": ("quantity", _HEAT_COLUMNS),
            "values": ((0.7014, 0.7211, 0.0197), (0.7682, 0.7666, 1.5999e-03),
                       (0.8008, 0.7976, 3.1984e-03), (0.8008, 0.8121, 0.0113),
                       (0.7682, 0.7721, 3.9114e-03), (0.7014, 0.7112, 9.8114e-03))},
    "T16": {"title": "time stepping, M=30", "rows": ("point", HEAT_POINTS),
            "cols": ("quantity", _HEAT_COLUMNS),
            "values": ((0.7014, 0.7112, 9.8321e-03), (0.7682, 0.7567, 0.0114),
                       (0.8008, 0.8100, 9.2124e-03), (0.8008, 0.8025, 1.7231e-03),
                       (0.7682, 0.7694, 1.2234e-03), (0.7014, 0.7100, 8.6241e-03))},
    # wave by Laplace transform; errors, columns T
    "T18": {"title": "Laplace transform, N=29", "rows": ("point", WAVE_POINTS),
            "cols": ("T", (15, 20)),
            "values": ((7.8634e-03, 2.0180e-03), (6.0318e-03, 0.0266), (7.7390e-03, 0.0647),
                       (0.0424, 0.0523), (0.0728, 0.0343), (0.0586, 0.0212))},
    "T19": {"title": "Laplace transform, N=37", "rows": ("point", WAVE_POINTS),
            "cols": ("T", (15, 20)),
            "values": ((9.0618e-04, 4.2558e-03), (0.0257, 0.0398), (0.0180, 0.0819),
                       (0.0446, 0.0828), (0.0716, 0.0732), (0.0547, 0.0416))},
    # wave by central differences; errors, columns T
    "T21": {"title": "time stepping, N=21, M=15", "rows": ("point", WAVE_POINTS),
            "cols": ("T", (5, 15)),
            "values": ((0.0197, 0.0138), (0.0151, 5.0604e-05), (6.1836e-03, 1.0821e-03),
                       (0.0377, 0.0343), (0.0260, 0.0615), (8.3917e-03, 0.0350))},
    "T22": {"title": "time stepping, N=157, M=10", "rows": ("point", WAVE_POINTS),
            "cols": ("T", (5, 15)),
            "values": ((7.4234e-04, 0.0146), (0.0239, 8.7654e-04), (0.0171, 8.0491e-04),
                       (3.0332e-03, 0.0355), (9.9534e-03, 0.0660), (7.9493e-03, 0.0521))},
    "T23": {"title": "time stepping, N=157, M=15", "rows": ("point", WAVE_POINTS),
            "cols": ("T", (5, 15)),
            "values": ((1.1104e-04, 8.8195e-04), (0.0225, 0.0214), (0.0155, 0.0143),
                       (1.3922e-03, 1.4931e-04), (0.0113, 0.0124), (8.8048e-03, 9.5762e-03))},
}


def paper_value(table_id, row, col):
    """Printed value at ``(row, col)`` or ``None`` when the cell is absent."""
    tab = TABLES[table_id]
    rows, cols = tab["rows"][1], tab["cols"][1]
    try:
        i, j = rows.index(row), cols.index(col)
    except ValueError:
        return None
    return tab["values"][i][j]
