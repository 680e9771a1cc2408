/* Compiled as C: the public header must be valid C11. */
#include <stdio.h>

#include "rescascade/rescascade.h"

int main(void) {
  rc_context* ctx = rc_context_create();
  rc_genset* g = NULL;
  int pass = 0;
  int ok = ctx != NULL && rc_genset_seed_p2(ctx, &g) == RC_OK &&
           rc_genset_verify(ctx, g, 0, NULL, 0, &pass, NULL) == RC_OK && pass == 1;
  rc_genset_destroy(g);
  rc_context_destroy(ctx);
  if (!ok) {
    fprintf(stderr, "C round trip failed\n");
    return 1;
  }
  return 0;
}
