import os

# Pin threading before numpy is imported so seeded reruns are bit-identical.
os.environ["A2A_DETERMINISTIC"] = "1"
for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
    os.environ.setdefault(var, "1")
