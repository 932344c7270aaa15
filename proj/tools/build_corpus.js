// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

// Compiles tests/corpus/*.wat and tests/modules/*.wat into .wasm files next to them.
// Usage: NODE_PATH=<dir containing the "wabt" npm package> node tools/build_corpus.js
const fs = require('fs');
const path = require('path');

const dirs = ['corpus', 'modules'].map((d) => path.join(__dirname, '..', 'tests', d));
const features = {bulk_memory: true, reference_types: true, sat_float_to_int: true, sign_extension: true};
require('wabt')().then((wabt) => {
  for (const dir of dirs) {
    for (const name of fs.readdirSync(dir).filter((f) => f.endsWith('.wat')).sort()) {
      const src = fs.readFileSync(path.join(dir, name), 'utf8');
      const mod = wabt.parseWat(name, src, features);
      mod.validate();
      const {buffer} = mod.toBinary({write_debug_names: false});
      const out = path.join(dir, name.replace(/\.wat$/, '.wasm'));
      fs.writeFileSync(out, Buffer.from(buffer));
      if (!WebAssembly.validate(buffer)) throw new Error(`${name}: rejected by WebAssembly.validate`);
      console.log(`${name} -> ${path.basename(out)} (${buffer.length} bytes)`);
    }
  }
});
