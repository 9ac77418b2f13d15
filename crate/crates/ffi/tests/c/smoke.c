#include <stdio.h>
#include <string.h>

#include "ovoid.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    OvoidField *f = NULL;
    CHECK(ovoid_field_new(5, &f) == OVOID_STATUS_OK);
    CHECK(ovoid_field_order(f) == 5);

    uint32_t r = 0;
    CHECK(ovoid_field_mul(f, 3, 4, &r) == OVOID_STATUS_OK && r == 2);
    CHECK(ovoid_field_div(f, 1, 0, &r) == OVOID_STATUS_FIELD);
    CHECK(ovoid_last_error() != NULL);

    OvoidModel *m = NULL;
    CHECK(ovoid_model_new(f, OVOID_MODEL_KIND_Q4, &m) == OVOID_STATUS_OK);
    size_t pts, lines, s, t;
    CHECK(ovoid_model_counts(m, &pts, &lines, &s, &t) == OVOID_STATUS_OK);
    CHECK(pts == 156 && lines == 156 && s == 5 && t == 5);

    OvoidSearchOptions opts = ovoid_search_options_default();
    OvoidPartialOvoid *k = NULL;
    CHECK(ovoid_search(m, &opts, &k) == OVOID_STATUS_OK);
    CHECK(ovoid_partial_ovoid_len(k) == 24);
    bool maximal = false;
    CHECK(ovoid_partial_ovoid_is_maximal(m, k, &maximal) == OVOID_STATUS_OK && maximal);

    char *census = NULL;
    CHECK(ovoid_census_json(m, k, &census) == OVOID_STATUS_OK);
    CHECK(strstr(census, "\"elliptic_values\":[0,2,3,5,8,12]") != NULL);
    ovoid_string_free(census);

    char *res = NULL;
    CHECK(ovoid_residues_json(7, &res) == OVOID_STATUS_OK);
    CHECK(strcmp(res, "[2,3,4,6]") == 0);
    ovoid_string_free(res);

    CHECK(ovoid_model_new(NULL, OVOID_MODEL_KIND_Q4, &m) == OVOID_STATUS_NULL_POINTER);

    ovoid_partial_ovoid_free(k);
    ovoid_model_free(m);
    ovoid_field_free(f);
    puts("ok");
    return 0;
}
