/** Reference drafts authored through the studio's own editing operations. */

import type { Draft } from "./schema.js";
import { initialState, placeAp, updateAp, updateDraft } from "./state.js";

/** Two gap-free same-name transmitters pushing 64 KB through 20% loss.
 *
 * This is the cross-interface reference draft: the committed fixture file
 * must equal `serializeDraft(studioDraft64kb())` byte for byte, and the
 * backend acceptance suite replays that document via both the HTTP
 * service and the CLI.
 */
export function studioDraft64kb(): Draft {
  let state = initialState();
  state = updateDraft(state, {
    seed: 42,
    duration_s: 280,
    road: [
      [0, 0],
      [1200, 0],
    ],
    traffic: { count: 80, headway_s: 2.5, speed_kmh_min: 60, speed_kmh_max: 70 },
  });
  state = placeAp(state, [500, 40], "ad-net"); // snaps onto the road line
  state = placeAp(state, [660, -25], "ad-net");
  for (const ap of state.draft.aps) {
    state = updateAp(state, ap.id, { loss_p: 0.2, size_bytes: 65536 });
  }
  return state.draft;
}
