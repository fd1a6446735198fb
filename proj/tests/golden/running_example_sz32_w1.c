/* running_example: tiled stencil kernel (stencil-forge)
 * tile sizes (32,32,32), intra-tile order (i,j,k), port width 1, 50 MHz
 * V: full V_buf[32,32,32] halo_left=0 width=1
 * A: chunk A_buf[2,33,33] halo_left=0 width=1
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

void running_example_kernel(float *V, float *A, long N) {
  for (long ti = 1; ti <= N - 2; ti += 32) {
    for (long tj = 1; tj <= N - 2; tj += 32) {
      for (long tk = 1; tk <= N - 2; tk += 32) {
        float V_buf[32][32][32];
        float A_buf[2][33][33];
#pragma HLS ARRAY_PARTITION variable=V_buf complete
#pragma HLS ARRAY_PARTITION variable=A_buf complete
        /* fill V_buf: ship(V, [ti,tk,tj], V_buf, [0,0,0], 3, 1) */
        for (long s1 = 0; s1 < 32; s1++)
          for (long s2 = 0; s2 < 32; s2++)
            burstcpy(&V_buf[0 + s1][0 + s2][0], &V[(((ti + s1) * (N) + (tk + s2)) * (N) + (tj))], 32, 1);
        /* fill first 1 slabs of A_buf: ship(A, [ti,tj,tk], A_buf, [0,0,0], 2, 1) */
        for (long s1 = 0; s1 < 33; s1++)
          burstcpy(&A_buf[0][0 + s1][0], &A[(((ti) * (N) + (tj + s1)) * (N) + (tk))], 33, 1);
        for (long i = 0; i <= SF_MIN(31, N - ti - 2); i += 1) {
          /* fill first 1 rows of incoming slab of A_buf: ship(A, [i + ti + 1,tj,tk], A_buf, [1,0,0], 1, 1) */
          burstcpy(&A_buf[1][0][0], &A[(((i + ti + 1) * (N) + (tj)) * (N) + (tk))], 33, 1);
          for (long j = 0; j <= SF_MIN(31, N - tj - 2); j += 1) {
#pragma HLS PIPELINE
            /* fill next row of A_buf: ship(A, [i + ti + 1,j + tj + 1,tk], A_buf, [1,j + 1,0], 1, 1) */
            burstcpy(&A_buf[1][j + 1][0], &A[(((i + ti + 1) * (N) + (j + tj + 1)) * (N) + (tk))], 33, 1);
            for (long k = 0; k <= 31; k += 1) { /* padded loop */
              V_buf[i][k][j] = V_buf[i][k][j] + A_buf[0][j][k] + A_buf[1][j + 1][k + 1];
            }
          }
          /* shift A_buf slabs down by 1: ship(A_buf, [1,0,0], A_buf, [0,0,0], 2, 1) */
          for (long s1 = 0; s1 < 33; s1++)
            burstcpy(&A_buf[0][0 + s1][0], &A_buf[1][0 + s1][0], 33, 1);
        }
        /* flush V_buf: ship(V_buf, [0,0,0], V, [ti,tk,tj], 3, 1) */
        for (long s1 = 0; s1 < SF_MIN(32, N - ti - 1); s1++)
          for (long s2 = 0; s2 < SF_MIN(32, N - tk - 1); s2++)
            burstcpy_edged(V, (((ti + s1) * (N) + (tk + s2)) * (N) + (tj)), &V_buf[0 + s1][0 + s2][0], SF_MIN(32, N - tj - 1), 1);
      }
    }
  }
}
