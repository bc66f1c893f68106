#include <stdio.h>
#include <string.h>

#include "densemap.h"

int main(void) {
    DmRational *q = NULL;
    char *text = NULL;
    if (dm_rational_between("1/2", "2/3", 256, &q) != DM_STATUS_OK) return 1;
    if (dm_rational_to_string(q, &text) != DM_STATUS_OK) return 2;
    if (strcmp(text, "7/12") != 0) return 3;
    dm_string_free(text);
    dm_rational_free(q);

    DmGreedyRun *run = NULL;
    if (dm_greedy_run(7, 100, DM_POLICY_ENUM, &run) != DM_STATUS_OK) return 4;
    if (dm_greedy_run_len(run) != 100) return 5;
    if (dm_greedy_run_check(run) != DM_STATUS_OK) return 6;
    dm_greedy_run_free(run);

    if (dm_rational_parse("x", &q) != DM_STATUS_INVALID_INPUT) return 7;
    if (dm_last_error() == NULL) return 8;
    puts("ok");
    return 0;
}
