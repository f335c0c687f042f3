void spmv(double *y, const int64_t *A_rowPtr, const int64_t *A_colIdx, const double *A_data, int64_t A_numRows, const double *x) {
#pragma omp parallel for schedule(dynamic,32)
  for (int64_t pA_i = 0; pA_i < A_numRows; ++pA_i) {
    for (int64_t pA_j = A_rowPtr[pA_i]; pA_j < A_rowPtr[pA_i + 1]; ++pA_j) y[pA_i] += A_data[pA_j] * x[A_colIdx[pA_j]];
  }
}
