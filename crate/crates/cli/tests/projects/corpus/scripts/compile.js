// Compiles every contract under contracts/ with the pinned solc.
// Exits nonzero when the compiler reports errors; warnings pass.
const fs = require("fs");
const path = require("path");
const solc = require("solc");

const dir = path.resolve("contracts");
const sources = {};
for (const name of fs.readdirSync(dir).sort()) {
  if (name.endsWith(".sol")) {
    sources[name] = { content: fs.readFileSync(path.join(dir, name), "utf8") };
  }
}
const input = {
  language: "Solidity",
  sources,
  settings: { outputSelection: { "*": { "*": [] } } },
};
const out = JSON.parse(solc.compile(JSON.stringify(input)));
const errors = (out.errors || []).filter((e) => e.severity === "error");
for (const e of errors) {
  console.error(e.formattedMessage);
}
process.exit(errors.length > 0 ? 1 : 0);
