import { describe, expect, it } from "vitest";
import { FIG2_HEADER, parseFig2Csv, SchemaError } from "../src/schema";

const GOOD = [
  FIG2_HEADER,
  "100,20,2000,400,1,1,1,0,123456789",
  "5000,20,2000,400,0.99987,0.9995,1,0.99982664696062624,123456789",
  "",
].join("\n");

describe("parseFig2Csv", () => {
  it("parses a conforming table", () => {
    const rows = parseFig2Csv(GOOD);
    expect(rows).toHaveLength(2);
    expect(rows[0].n).toBe(100);
    expect(rows[1].boundEq12).toBeCloseTo(0.99982664696062624, 12);
    expect(rows[1].seed).toBe(123456789);
  });

  it("accepts a header-only table", () => {
    expect(parseFig2Csv(FIG2_HEADER + "\n")).toHaveLength(0);
  });

  it("rejects a wrong header with line 1", () => {
    expect(() => parseFig2Csv("a,b,c\n1,2,3\n")).toThrowError(/line 1/);
  });

  it("rejects a short row with its line number", () => {
    const text = [FIG2_HEADER, "100,20,2000,400,1,1,1,0,7", "5000,20,2000", ""].join("\n");
    try {
      parseFig2Csv(text);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect((err as SchemaError).line).toBe(3);
    }
  });

  it("rejects frequencies outside [0, 1]", () => {
    const text = [FIG2_HEADER, "10,5,50,10,1.5,1,1,0,7", ""].join("\n");
    expect(() => parseFig2Csv(text)).toThrowError(/mean_freq/);
  });

  it("rejects min > mean ordering violations", () => {
    const text = [FIG2_HEADER, "10,5,50,10,0.4,0.6,0.9,0,7", ""].join("\n");
    expect(() => parseFig2Csv(text)).toThrowError(/min_freq <= mean_freq/);
  });

  it("rejects non-integer counts", () => {
    const text = [FIG2_HEADER, "10.5,5,50,10,0.5,0.4,0.9,0,7", ""].join("\n");
    expect(() => parseFig2Csv(text)).toThrowError(/non-negative integer/);
  });

  it("rejects an empty file", () => {
    expect(() => parseFig2Csv("")).toThrowError(/empty/);
  });
});
