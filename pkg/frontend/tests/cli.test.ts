import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { main } from "../src/cli";
import { FIG2_HEADER } from "../src/schema";

const GOOD = [
  FIG2_HEADER,
  "100,20,2000,400,1,1,1,0,123456789",
  "5000,20,2000,400,1,1,1,0.9998266,123456789",
  "",
].join("\n");

function workdir(): string {
  return mkdtempSync(join(tmpdir(), "plots-"));
}

describe("plot-fig2 cli", () => {
  it("renders svg from a conforming csv", () => {
    const dir = workdir();
    const csv = join(dir, "t.csv");
    const out = join(dir, "t.svg");
    writeFileSync(csv, GOOD);
    expect(main([csv, out])).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg).toContain("series-bound");
  });

  it("renders png from a conforming csv", () => {
    const dir = workdir();
    const csv = join(dir, "t.csv");
    const out = join(dir, "t.png");
    writeFileSync(csv, GOOD);
    expect(main([csv, out])).toBe(0);
    const png = readFileSync(out);
    expect(png.subarray(1, 4).toString("ascii")).toBe("PNG");
  });

  it("rejects a corrupted csv with a nonzero exit naming the row", () => {
    const dir = workdir();
    const csv = join(dir, "bad.csv");
    writeFileSync(csv, [FIG2_HEADER, "100,20,2000,400,0.5,0.9,1,0,7", ""].join("\n"));
    const errs: string[] = [];
    const orig = process.stderr.write.bind(process.stderr);
    process.stderr.write = ((s: string) => {
      errs.push(String(s));
      return true;
    }) as typeof process.stderr.write;
    try {
      expect(main([csv, join(dir, "x.svg")])).toBe(2);
    } finally {
      process.stderr.write = orig;
    }
    expect(errs.join("")).toMatch(/line 2/);
  });

  it("requires exactly two positionals", () => {
    expect(main([])).toBe(2);
    expect(main(["only-one.csv"])).toBe(2);
  });

  it("rejects unknown extensions and flags", () => {
    const dir = workdir();
    const csv = join(dir, "t.csv");
    writeFileSync(csv, GOOD);
    expect(main([csv, join(dir, "t.gif")])).toBe(2);
    expect(main(["--wat", csv, join(dir, "t.svg")])).toBe(2);
  });

  it("returns 1 when the input is missing", () => {
    expect(main(["/definitely/missing.csv", "/tmp/out.svg"])).toBe(1);
  });

  it("accepts color overrides", () => {
    const dir = workdir();
    const csv = join(dir, "t.csv");
    const out = join(dir, "c.svg");
    writeFileSync(csv, GOOD);
    expect(main([csv, out, "--color-mean", "aa0011"])).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain("#aa0011");
  });
});
