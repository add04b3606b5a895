/** Write the committed draft fixture from the studio's preset program.
 *
 * Regenerate with `npm run build && npm run fixtures` after changing the
 * serializer or the preset; the studio tests fail if the committed bytes
 * drift from what this produces.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { studioDraft64kb } from "../src/presets.js";
import { serializeDraft } from "../src/schema.js";

const here = dirname(fileURLToPath(import.meta.url));
// Compiled location is dist/scripts/; fixtures live in frontend/fixtures/.
const out = join(here, "..", "..", "fixtures", "studio_draft_64kb.json");
mkdirSync(dirname(out), { recursive: true });
writeFileSync(out, serializeDraft(studioDraft64kb()));
console.log(`wrote ${out}`);
