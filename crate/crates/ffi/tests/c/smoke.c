#include <stdio.h>
#include <string.h>
#include "polylog.h"

static int check(int cond, const char *what) {
    if (!cond) fprintf(stderr, "failed: %s\n", what);
    return cond ? 0 : 1;
}

int main(void) {
    int bad = 0;
    PolylogCtx *ctx = NULL;
    bad += check(polylog_ctx_new(7, 2, 6, &ctx) == POLYLOG_STATUS_OK, "ctx_new");
    uint64_t q = 0;
    bad += check(polylog_ctx_field_order(ctx, &q) == POLYLOG_STATUS_OK && q == 49, "field order");

    uint64_t v = 99;
    bad += check(polylog_li_finite(ctx, 1, 1, &v) == POLYLOG_STATUS_OK && v == 0, "li_1(1)");
    bad += check(polylog_sigma(ctx, 3, &v) == POLYLOG_STATUS_OK && v == 3, "sigma fixes F_p");

    char *json = NULL;
    bad += check(polylog_teichmuller(ctx, 2, &json) == POLYLOG_STATUS_OK && json && strstr(json, "\"coeffs\""), "teichmuller");
    polylog_string_free(json);

    uint64_t w[2] = {3, 1};
    json = NULL;
    bad += check(polylog_li_padic(ctx, 2, 9, w, 2, 0, &json) == POLYLOG_STATUS_OK && json && json[0] == '[', "li_padic");
    polylog_string_free(json);

    int64_t num = 0;
    uint64_t den = 0;
    bad += check(polylog_a_coeff(3, 2, &num, &den) == POLYLOG_STATUS_OK && num == -1 && den == 2, "a_2 for n = 3");

    bad += check(polylog_ctx_new(9, 1, 4, &ctx) == POLYLOG_STATUS_NOT_ODD_PRIME, "rejects 9");
    bad += check(polylog_last_error() != NULL, "last error");

    json = NULL;
    PolylogStatus s = polylog_verify("{\"check\":\"identities\",\"p\":7,\"n\":6}", &json);
    bad += check(s == POLYLOG_STATUS_OK && json && strstr(json, "\"pass\": true"), "verify");
    polylog_string_free(json);

    polylog_ctx_free(ctx);
    printf("%s %s\n", polylog_version(), bad ? "FAIL" : "ok");
    return bad;
}
