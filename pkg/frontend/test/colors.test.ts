import { describe, expect, it } from "vitest";

import { borderColorForGroup, colorForGroup, hashString } from "../src/colors.js";

describe("group colors", () => {
  it("is deterministic for the same group key", () => {
    expect(colorForGroup("3")).toBe(colorForGroup("3"));
    expect(borderColorForGroup("3")).toBe(borderColorForGroup("3"));
  });

  it("derives the hue from the group key alone", () => {
    const hue = hashString("6b") % 360;
    expect(colorForGroup("6b")).toBe(`hsl(${hue}, 70%, 82%)`);
  });

  it("spreads nearby keys across hues", () => {
    const hues = new Set(["1", "2", "3", "4", "5", "6", "7"].map((k) => hashString(k) % 360));
    expect(hues.size).toBeGreaterThan(4);
  });

  it("hash is stable across calls and inputs are order-sensitive", () => {
    expect(hashString("abc")).toBe(hashString("abc"));
    expect(hashString("abc")).not.toBe(hashString("cba"));
  });
});
