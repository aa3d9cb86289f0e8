#include <stdio.h>
#include <string.h>

#include "nmshare.h"

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "line %d: %s\n", __LINE__, #cond);         \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    NmsFamily *family = NULL;
    CHECK(nms_cyclotomic_family(13, 3, 2, 2, &family) == NMS_STATUS_OK);

    NmsReport report;
    CHECK(nms_verify_cedf(family, 1, &report) == NMS_STATUS_OK);
    CHECK(report.valid && report.lambda == 1);

    char json[128];
    size_t needed = 0;
    CHECK(nms_family_to_json(family, json, sizeof json, &needed) == NMS_STATUS_OK);
    CHECK(strcmp(json, "{\"n\":13,\"sets\":[[1,12],[4,9],[3,10]]}") == 0);

    uint64_t num = 0, den = 0;
    CHECK(nms_advantage(family, NMS_GAME_CIRCULAR_WEAK, 1, &num, &den) == NMS_STATUS_OK);
    CHECK(num == 1 && den == 6);

    NmsScheme *scheme = NULL;
    CHECK(nms_scheme_composed(family, 2, 3, &scheme) == NMS_STATUS_OK);
    uint64_t ys[3];
    CHECK(nms_scheme_share(scheme, 2, 7, ys, 3) == NMS_STATUS_OK);
    uint64_t xs[2] = {2, 3}, pair[2] = {ys[1], ys[2]}, secret = 99;
    bool detected = true;
    CHECK(nms_scheme_recover(scheme, xs, pair, 2, &secret, &detected) == NMS_STATUS_OK);
    CHECK(secret == 2 && !detected);

    CHECK(nms_cyclotomic_family(15, 7, 1, 2, NULL) == NMS_STATUS_NULL_POINTER);
    NmsFamily *bad = NULL;
    CHECK(nms_cyclotomic_family(15, 7, 1, 2, &bad) == NMS_STATUS_NOT_PRIME);
    char msg[256];
    CHECK(nms_last_error(msg, sizeof msg) > 1);
    CHECK(strstr(msg, "15") != NULL);

    nms_scheme_free(scheme);
    nms_family_free(family);
    puts("ok");
    return 0;
}
