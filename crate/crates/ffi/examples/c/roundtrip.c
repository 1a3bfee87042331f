#include <math.h>
#include <stdio.h>

#include "spectral_sl.h"

int main(void) {
    SslComplex q[2] = {{0.6, -0.2}, {0.0, 0.3}};
    SslOperator *op = NULL;
    SslStatus s = ssl_operator_new(1.5, q, 2, 30, &op);
    if (s != SSL_STATUS_OK) {
        fprintf(stderr, "new: %s\n", ssl_last_error_message());
        return 1;
    }

    SslConnection c;
    SslComplex lam = {2.0, 1.0};
    s = ssl_connection_coefficients(op, lam, &c);
    if (s != SSL_STATUS_OK) {
        fprintf(stderr, "coefficients: %s\n", ssl_last_error_message());
        return 1;
    }
    printf("C12(2+i) = %.12f%+.12fi\n", c.c12.re, c.c12.im);

    double beta = 0.0;
    SslComplex out[3];
    s = ssl_reconstruct(op, 3, &beta, out);
    if (s != SSL_STATUS_OK) {
        fprintf(stderr, "reconstruct: %s\n", ssl_last_error_message());
        return 1;
    }
    printf("beta = %.10f\n", beta);
    for (int n = 0; n < 3; n++) {
        printf("q_%d = %.10f%+.10fi\n", n + 1, out[n].re, out[n].im);
    }

    s = ssl_vtable_entry(op, 3, 1, &lam);
    printf("bad entry: %s (%s)\n", ssl_status_name(s), ssl_last_error_message());

    ssl_operator_free(op);
    return fabs(beta - 1.5) < 1e-8 ? 0 : 1;
}
