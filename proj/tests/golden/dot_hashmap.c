void dot(double *v, const int64_t *A_idx, const double *A_val, int64_t A_len, const int64_t *B_idx, const double *B_val, int64_t B_len) {
  spf_hash_t hash_pB;
  spf_hash_init(&hash_pB, B_len);
  for (int64_t pB = 0; pB < B_len; ++pB) spf_hash_set(&hash_pB, B_idx[pB], pB);
  for (int64_t pA = 0; pA < A_len; ++pA) {
    int64_t i = A_idx[pA];
    int64_t pB = spf_hash_find(&hash_pB, i);
    if (pB != -1) *v += A_val[pA] * B_val[pB];
  }
  spf_hash_free(&hash_pB);
}
