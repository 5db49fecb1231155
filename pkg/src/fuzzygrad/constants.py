"""Numerical guard constants shared across the package."""

# Floor applied to Gaussian spreads so membership grades stay evaluable.
EPS_SIGMA = 1e-6

# Additive guard in every firing-strength normalizer (T1 output, enumeration
# candidates and the iterative reducer use the same value so they agree).
EPS_FIRING = 1e-12

# Z-score divisor guard for (near-)constant columns.
EPS_STD = 1e-12

# Column chunk for the enumeration scan: at most 2**14 switch columns per
# pass.  Fixed (not adaptive) so candidate arithmetic never depends on batch
# size or available memory.
ENUM_CHUNK_BITS = 14

# Scratch budget (elements per temporary) used to block rows in the numpy
# scan backend.  Row blocking cannot change results; columns are chunked on
# fixed boundaries only.
ENUM_ROW_BUDGET = 1 << 21
