void three_way(double *v, const int64_t *A_idx, const double *A_val, int64_t A_len, const int64_t *B_idx, const double *B_val, int64_t B_len, const int64_t *C_idx, const double *C_val, int64_t C_len) {
  spf_hash_t hash_pC;
  spf_hash_init(&hash_pC, C_len);
  for (int64_t pC = 0; pC < C_len; ++pC) spf_hash_set(&hash_pC, C_idx[pC], pC);
  int64_t pB = B_len - 1;
  for (int64_t pA = 0; pA < A_len; ++pA) {
    int64_t i = A_idx[pA];
    while (pB >= 0 && i > B_idx[pB]) --pB;
    if (pB >= 0 && i == B_idx[pB]) {
      int64_t pC = spf_hash_find(&hash_pC, i);
      if (pC != -1) *v += A_val[pA] * B_val[pB] * C_val[pC];
      --pB;
    }
  }
  spf_hash_free(&hash_pC);
}
