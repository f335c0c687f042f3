void dot(double *v, const int64_t *A_idx, const double *A_val, int64_t A_len, const int64_t *B_idx, const double *B_val, int64_t B_len) {
  int64_t pB = 0;
  for (int64_t pA = 0; pA < A_len; ++pA) {
    int64_t i = A_idx[pA];
    while (pB < B_len && i > B_idx[pB]) ++pB;
    if (pB < B_len && i == B_idx[pB]) {
      *v += A_val[pA] * B_val[pB];
      ++pB;
    }
  }
}
