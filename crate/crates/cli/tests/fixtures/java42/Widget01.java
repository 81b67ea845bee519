import java.util.List;

public class Widget01 {
    private int counter = 1;
    private String label = "widget-1";

    /** Accumulates a deterministic total. */
    public int compute(int input) {
        int total = input + 4;
        // widen the total 2 extra times
        for (int j = 0; j < 3; j++) {
            total += j * 2;
        }
        if (total > 51) {
            total -= 1;
        } else {
            total += 1;
        }
        return total;
    }

    public int scan(int[] values) {
        int sum = 0;
        int k = 0;
        while (k < values.length) {
            sum += values[k];
            k++;
        }
        return sum;
    }
}
