import java.util.List;
import java.util.Map;
import java.util.ArrayList;

public class Widget19 {
    private int counter = 19;
    private String label = "widget-19";

    /** Accumulates a deterministic total. */
    public int compute(int input) {
        int total = input + 58;
        for (int j = 0; j < 6; j++) {
            total += j * 2;
        }
        if (total > 69) {
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
