#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "handsign.h"

static int fail(const char *what) {
    const char *err = hs_last_error();
    fprintf(stderr, "%s: %s\n", what, err ? err : "(no message)");
    return 1;
}

/* Reads a binary PGM produced by the test harness. */
static unsigned char *read_pgm(const char *path, unsigned *w, unsigned *h) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    unsigned maxval;
    if (fscanf(f, "P5 %u %u %u", w, h, &maxval) != 3) { fclose(f); return NULL; }
    fgetc(f);
    unsigned char *px = malloc((size_t)*w * *h);
    if (fread(px, 1, (size_t)*w * *h, f) != (size_t)*w * *h) { free(px); px = NULL; }
    fclose(f);
    return px;
}

int main(int argc, char **argv) {
    if (argc != 2) return 2;
    unsigned w, h;
    unsigned char *px = read_pgm(argv[1], &w, &h);
    if (!px) return fail("read_pgm");

    HsEngine *engine = NULL;
    if (hs_engine_new(&engine) != HS_STATUS_OK) return fail("engine");

    HsFrame frame;
    if (hs_recognize(engine, px, w, h, w, &frame) != HS_STATUS_OK) return fail("recognize");

    HsSession *session = NULL;
    if (hs_session_new(2, &session) != HS_STATUS_OK) return fail("session");
    char stable = 0;
    for (int i = 1; i <= 3; i++) {
        HsFrame f;
        if (hs_session_push(session, engine, px, w, h, w, 1.75 * i, &f) != HS_STATUS_OK) return fail("push");
        if (f.stable_letter) stable = (char)f.stable_letter;
    }
    HsMetrics m;
    if (hs_session_metrics(session, &m) != HS_STATUS_OK) return fail("metrics");

    if (hs_session_new(0, &session) != HS_STATUS_INVALID_ARGUMENT) return fail("window 0 accepted");

    printf("%s %c %c %llu %.1f\n", hs_version(), frame.letter, stable,
           (unsigned long long)m.frames_processed, m.a_o);
    hs_session_free(session);
    hs_engine_free(engine);
    free(px);
    return 0;
}
