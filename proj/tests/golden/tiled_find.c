void tiled(const int64_t *f, int64_t k, int64_t n) {
  for (int64_t ti = 0; 8 * ti < n; ++ti) {
    if (f[8 * ti] <= k && f[min(n, 8 * ti + 8) - 1] >= k) {
      for (int64_t i = 8 * ti; i < min(n, 8 * ti + 8); ++i) {
        if (f[i] == k) S0();
      }
    }
  }
}
