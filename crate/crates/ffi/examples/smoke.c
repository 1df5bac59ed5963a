#include <assert.h>
#include <stdio.h>
#include "segtrack.h"

int main(void) {
    /* Hollow frame mask: the centroid falls in the hole, the inner center
       stays on the band. */
    stk_mask *m = NULL;
    assert(stk_mask_new(32, 32, &m) == STK_OK);
    assert(stk_mask_fill_rect(m, 2, 2, 30, 30, true) == STK_OK);
    assert(stk_mask_fill_rect(m, 8, 8, 24, 24, false) == STK_OK);

    uint32_t cx, cy, ix, iy;
    bool on;
    assert(stk_mask_centroid(m, &cx, &cy) == STK_OK);
    assert(stk_mask_get(m, cx, cy, &on) == STK_OK && !on);
    assert(stk_mask_inner_center(m, 64, 17, &ix, &iy) == STK_OK);
    assert(stk_mask_get(m, ix, iy, &on) == STK_OK && on);

    /* Error path: message names the offending coordinates. */
    assert(stk_mask_set(m, 99, 0, true) == STK_OUT_OF_BOUNDS);
    printf("error message: %s\n", stk_last_error_message());

    /* Two-frame tracking with swapped detection order. */
    stk_tracker_params p;
    assert(stk_tracker_params_default(&p) == STK_OK);
    stk_tracker *t = NULL;
    assert(stk_tracker_new(&p, &t) == STK_OK);

    double ea[3] = {1.0, 0.0, 0.0}, eb[3] = {0.0, 1.0, 0.0};
    stk_detection f0[2] = {
        {10, 10, 22, 30, 0.9, ea, 3, NULL},
        {60, 10, 72, 30, 0.9, eb, 3, NULL},
    };
    uint32_t ids[2];
    assert(stk_tracker_step(t, 0, f0, 2, ids) == STK_OK);
    assert(ids[0] == 1 && ids[1] == 2);

    stk_detection f1[2] = {
        {62, 10, 74, 30, 0.9, eb, 3, NULL},
        {12, 10, 24, 30, 0.9, ea, 3, NULL},
    };
    assert(stk_tracker_step(t, 1, f1, 2, ids) == STK_OK);
    assert(ids[0] == 2 && ids[1] == 1);

    size_t live = 0;
    assert(stk_tracker_live_tracks(t, &live) == STK_OK && live == 2);

    stk_tracker_free(t);
    stk_mask_free(m);
    printf("C ABI smoke test passed: ids stable across swapped frames\n");
    return 0;
}
