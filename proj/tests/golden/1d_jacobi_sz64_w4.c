/* 1d_jacobi: tiled stencil kernel (stencil-forge)
 * tile sizes (64), intra-tile order (i), port width 4, 50 MHz
 * A: line A_buf[68] halo_left=1 width=4
 * B: line B_buf[68] halo_left=0 width=4
 * host note: allocate DDR arrays with slack past the logical end;
 * padded boundary tiles read (never write) up to one tile past it.
 */
#include <string.h>

#define SF_MIN(a, b) ((a) < (b) ? (a) : (b))

/* w-wide port transfer; DDR address and length divisible by w */
static void burstcpy(float *dst, const float *src, long n, int w) {
  (void)w;
  memcpy(dst, src, (size_t)n * sizeof(float));
}

/* trimmed write-back: scalar edges around an aligned wide middle */
static void burstcpy_edged(float *base, long off, const float *src,
                           long n, int w) {
  long head = w > 1 ? (w - off % w) % w : 0;
  if (head > n) head = n;
  long mid = w > 1 ? ((n - head) / w) * w : n - head;
  memcpy(base + off, src, (size_t)head * sizeof(float));
  burstcpy(base + off + head, src + head, mid, w);
  memcpy(base + off + head + mid, src + head + mid,
         (size_t)(n - head - mid) * sizeof(float));
}

void sf_1d_jacobi_kernel(float *A, float *B, long N) {
  for (long ti = 1; ti <= N - 2; ti += 64) {
    float A_buf[68]; /* halo_left=1 */
    float B_buf[68];
#pragma HLS ARRAY_PARTITION variable=A_buf complete
#pragma HLS ARRAY_PARTITION variable=B_buf complete
    /* fill line B_buf: ship(B, [ti - 1], B_buf, [0], 1, 1) */
    burstcpy(&B_buf[0], &B[(ti - 1)], 68, 4);
    for (long i = 0; i <= 63; i += 1) { /* padded loop */
#pragma HLS PIPELINE
      A_buf[i + 1] = (B_buf[i] + B_buf[i + 1] + B_buf[i + 2]) / 3.0;
    }
    /* flush A_buf: ship(A_buf, [1], A, [ti], 1, 1) */
    burstcpy_edged(A, (ti), &A_buf[1], SF_MIN(64, N - ti - 1), 4);
  }
}
