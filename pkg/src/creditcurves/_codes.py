"""Integer variant codes shared by both kernel backends."""

LOGISTIC = 0
GOMPERTZ_STRICT = 1
GOMPERTZ_FREE = 2
GENERALIZED = 3

# exp() argument clamp; beyond this the evaluators return the asymptote
EXP_CLAMP = 700.0
